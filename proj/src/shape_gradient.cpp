#include "bshape/shape_gradient.hpp"

#include "bshape/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bshape {

namespace {

void require_length(std::size_t got, const BoundaryCurve& curve, const char* who)
{
    if (got != static_cast<std::size_t>(curve.n_intervals()) + 1) {
        std::ostringstream msg;
        msg << who << ": expected " << curve.n_intervals() + 1 << " nodal values, got " << got;
        throw DomainError(msg.str());
    }
}

double normal_derivative(const Eigen::MatrixXd& grad, int row, const std::array<double, 2>& n)
{
    return grad(row, 0) * n[0] + grad(row, 1) * n[1];
}

double density_on_side(const StateSolution& state, const AdjointSolution& adjoint, double mean,
                       double xi, BottomSide side)
{
    const PhysicalParams& prm = state.ops->params();
    const BottomPoint bp = locate_on_bottom(*state.disc().mesh, xi, side);
    const auto n = normal_from_slope(bp.edge_slope);

    const Eigen::MatrixXd gv = evaluate_gradient_on_bottom(state.v, xi, side);
    const Eigen::MatrixXd gw = evaluate_gradient_on_bottom(adjoint.w, xi, side);
    const Eigen::MatrixXd gt = evaluate_gradient_on_bottom(state.T_hat, xi, side);
    const Eigen::MatrixXd gs = evaluate_gradient_on_bottom(adjoint.S, xi, side);

    double flow = 0.0;
    for (int c = 0; c < 2; ++c) {
        flow += normal_derivative(gv, c, n) * normal_derivative(gw, c, n);
    }
    const double heat = normal_derivative(gt, 0, n) * normal_derivative(gs, 0, n);
    const double dev = state.T.value(bp.triangle, bp.bary) - mean;
    return flow / prm.Re + prm.kappa() * heat + 0.5 * dev * dev;
}

} // namespace

std::vector<double> shape_density_F(const StateSolution& state, const AdjointSolution& adjoint,
                                    const BoundaryCurve& curve)
{
    const double mean = mean_temperature(state.T);
    const int n = curve.n_intervals();
    std::vector<double> F(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double xi = curve.node(i);
        const double left = density_on_side(state, adjoint, mean, xi, BottomSide::Left);
        const double right = density_on_side(state, adjoint, mean, xi, BottomSide::Right);
        F[static_cast<std::size_t>(i)] = 0.5 * (left + right);
    }
    return F;
}

std::vector<double> regularized_gradient(const std::vector<double>& F, const BoundaryCurve& curve,
                                         const Penalties& pen)
{
    require_length(F.size(), curve, "regularized_gradient");
    const auto d2 = curve_second_difference(curve);
    const double mean = curve_integrals(curve, pen.nu).mean;
    std::vector<double> dj(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double plus = std::max(curve[i] - 1.0 + pen.nu, 0.0);
        dj[i] = -F[i] - pen.lambda1 * d2[i] + pen.lambda2 * mean + pen.lambda3 * plus;
    }
    return dj;
}

std::vector<double> precondition(const std::vector<double>& DJ)
{
    if (DJ.size() < 3) {
        throw DomainError("precondition: need at least two intervals");
    }
    const std::size_t n = DJ.size() - 1;
    const double h2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    // Thomas algorithm for tridiag(-1, 2, -1) phi = h^2 DJ on nodes 1..n-1
    const std::size_t m = n - 1;
    std::vector<double> c(m), d(m);
    double denom = 2.0;
    c[0] = -1.0 / denom;
    d[0] = h2 * DJ[1] / denom;
    for (std::size_t i = 1; i < m; ++i) {
        denom = 2.0 + c[i - 1];
        c[i] = -1.0 / denom;
        d[i] = (h2 * DJ[i + 1] + d[i - 1]) / denom;
    }
    std::vector<double> phi(n + 1, 0.0);
    phi[m] = d[m - 1];
    for (std::size_t i = m - 1; i >= 1; --i) {
        phi[i] = d[i - 1] - c[i - 1] * phi[i + 1];
    }
    return phi;
}

double directional_derivative(const std::vector<double>& F, const BoundaryCurve& curve,
                              const Penalties& pen, const std::vector<double>& h)
{
    require_length(h.size(), curve, "directional_derivative");
    if (h.front() != 0.0 || h.back() != 0.0) {
        throw DomainError("directional_derivative: direction must vanish at both endpoints");
    }
    const auto dj = regularized_gradient(F, curve, pen);
    const auto w = trapezoid_weights(curve.n_intervals());
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        s += w[i] * dj[i] * h[i];
    }
    return s;
}

double optimality_scale(const std::vector<double>& F, const BoundaryCurve& curve, double lambda1)
{
    require_length(F.size(), curve, "optimality_scale");
    const auto d2 = curve_second_difference(curve);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < F.size(); ++i) {
        m = std::max(m, std::abs(F[i] + lambda1 * d2[i]));
    }
    return m;
}

double optimality_residual(const std::vector<double>& F, const BoundaryCurve& curve, double lambda1,
                           const std::vector<std::vector<double>>& candidates)
{
    require_length(F.size(), curve, "optimality_residual");
    const auto d2 = curve_second_difference(curve);
    const auto w = trapezoid_weights(curve.n_intervals());
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& h : candidates) {
        require_length(h.size(), curve, "optimality_residual");
        double s = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            s += w[i] * (F[i] + lambda1 * d2[i]) * (curve[i] - h[i]);
        }
        worst = std::min(worst, s);
    }
    return candidates.empty() ? 0.0 : worst;
}

GradientSample compute_gradient(const StateSolution& state, const AdjointSolution& adjoint,
                                const BoundaryCurve& curve, const Penalties& pen)
{
    GradientSample g;
    g.xi = curve.nodes();
    g.F = shape_density_F(state, adjoint, curve);
    g.DJ = regularized_gradient(g.F, curve, pen);
    g.phi = precondition(g.DJ);
    return g;
}

} // namespace bshape
