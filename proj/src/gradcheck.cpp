#include "bshape/gradcheck.hpp"

#include "bshape/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace bshape {

CostBreakdown reduced_cost(const BoundaryCurve& curve, double h, const PhysicalParams& params,
                           const Penalties& pen, const PicardOptions& picard)
{
    const Discretization disc = make_discretization(build_mesh(curve, h));
    const StateSolution state = solve_state(disc, params, picard);
    return evaluate_cost(state, curve, pen);
}

double GradCheckResult::max_rel_error() const
{
    double m = 0.0;
    for (const auto& d : directions) {
        m = std::max(m, d.rel_error);
    }
    return m;
}

std::vector<std::vector<double>> random_directions(int curve_n, int count, std::uint64_t seed)
{
    if (curve_n < 2 || count < 0) {
        throw DomainError("random_directions: need curve_n >= 2 and count >= 0");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.5, 1.0);
    std::uniform_real_distribution<double> any(-1.0, 1.0);
    std::bernoulli_distribution sign(0.5);
    std::vector<std::vector<double>> dirs;
    for (int d = 0; d < count; ++d) {
        const double c1 = (sign(rng) ? 1.0 : -1.0) * mag(rng);
        const double c2 = any(rng);
        const double c3 = (sign(rng) ? 1.0 : -1.0) * mag(rng);
        std::vector<double> h(static_cast<std::size_t>(curve_n) + 1, 0.0);
        for (int i = 1; i < curve_n; ++i) {
            const double x = static_cast<double>(i) / curve_n;
            h[static_cast<std::size_t>(i)] = c1 * std::sin(std::numbers::pi * x) +
                                             c2 * std::sin(2.0 * std::numbers::pi * x) +
                                             c3 * std::sin(3.0 * std::numbers::pi * x);
        }
        dirs.push_back(std::move(h));
    }
    return dirs;
}

GradCheckResult run_gradcheck(const BoundaryCurve& curve, const GradCheckConfig& cfg)
{
    if (curve.n_intervals() != cfg.curve_n) {
        throw DomainError("run_gradcheck: curve grid does not match curve_n");
    }
    if (!(cfg.fd_step > 0.0)) {
        throw DomainError("run_gradcheck: fd_step must be positive");
    }
    const Discretization disc = make_discretization(build_mesh(curve, cfg.h));
    const StateSolution state = solve_state(disc, cfg.physical, cfg.picard);
    const AdjointSolution adj = solve_adjoint(state);
    const auto F = shape_density_F(state, adj, curve);

    GradCheckResult out;
    out.h = cfg.h;
    out.curve_n = cfg.curve_n;
    const auto values = curve.values();
    for (auto& dir : random_directions(cfg.curve_n, cfg.n_dirs, cfg.seed)) {
        DirectionCheck dc;
        dc.adjoint = directional_derivative(F, curve, cfg.penalties, dir);
        std::vector<double> plus(values.begin(), values.end());
        std::vector<double> minus(values.begin(), values.end());
        for (std::size_t i = 0; i < dir.size(); ++i) {
            plus[i] += cfg.fd_step * dir[i];
            minus[i] -= cfg.fd_step * dir[i];
        }
        const double jp = reduced_cost(BoundaryCurve(plus), cfg.h, cfg.physical, cfg.penalties, cfg.picard).total;
        const double jm = reduced_cost(BoundaryCurve(minus), cfg.h, cfg.physical, cfg.penalties, cfg.picard).total;
        dc.finite_difference = (jp - jm) / (2.0 * cfg.fd_step);
        dc.rel_error = std::abs(dc.adjoint - dc.finite_difference) /
                       std::max(std::abs(dc.finite_difference), 1e-300);
        dc.direction = std::move(dir);
        out.directions.push_back(std::move(dc));
    }
    return out;
}

} // namespace bshape
