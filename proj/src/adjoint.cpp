#include "bshape/adjoint.hpp"

#include "bshape/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bshape {

namespace {

struct Linearization {
    SparseOperator transport;  ///< (C1(v) + R1(v))^T on VectorP2
    SparseOperator coupling;   ///< B2v(T)^T: ScalarP2 -> VectorP2
    SparseOperator convection; ///< C2(v)^T on ScalarP2
};

Linearization linearize(const StateSolution& state)
{
    const Discretization& disc = state.disc();
    Linearization l;
    l.transport = SparseOperator((assemble_convection_b1(disc, state.v) +
                                  assemble_reaction_b1(disc, state.v)).transpose());
    l.coupling = SparseOperator(assemble_b2_velocity_form(disc, state.T).transpose());
    l.convection = SparseOperator(assemble_convection_b2(disc, state.v).transpose());
    return l;
}

std::vector<char> adjoint_mask(const BoussinesqOperators& ops)
{
    std::vector<char> mask = ops.stokes_mask();
    mask.insert(mask.end(), ops.temperature_mask().begin(), ops.temperature_mask().end());
    return mask;
}

double max_div(const BoussinesqOperators& ops, const Eigen::VectorXd& w)
{
    return (ops.stokes().divergence * w).cwiseAbs().maxCoeff();
}

} // namespace

Eigen::VectorXd adjoint_load(const StateSolution& state)
{
    const BoussinesqOperators& ops = *state.ops;
    const double mean = mean_temperature(state.T);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops.nt());
    return ops.mass() * (state.T.coeffs() - mean * ones);
}

SparseOperator assemble_adjoint_operator(const StateSolution& state)
{
    const BoussinesqOperators& ops = *state.ops;
    const Linearization lin = linearize(state);
    const int ns = ops.stokes_size();
    const int n = ns + ops.nt();
    const SparseOperator stokes = ops.stokes_matrix();
    SparseOperator temperature = ops.stiffness() * ops.params().kappa();
    temperature += lin.convection;
    return assemble_blocks(n, n,
                           {{0, 0, &stokes, 1.0, false},
                            {0, 0, &lin.transport, 1.0, false},
                            {0, ns, &lin.coupling, 1.0, false},
                            {ns, 0, &ops.buoyancy(), -1.0, true},
                            {ns, ns, &temperature, 1.0, false}});
}

AdjointSolution solve_adjoint(const StateSolution& state)
{
    const BoussinesqOperators& ops = *state.ops;
    const Discretization& disc = state.disc();

    SparseOperator a = assemble_adjoint_operator(state);
    const std::vector<char> mask = adjoint_mask(ops);
    eliminate_dofs(a, mask);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
    rhs.tail(ops.nt()) = adjoint_load(state);
    zero_dofs(rhs, mask);

    AdjointSolution out;
    if (rhs.squaredNorm() == 0.0) {
        out.w = FEFunction(disc.velocity);
        out.q = FEFunction(disc.pressure);
        out.S = FEFunction(disc.temperature);
        return out;
    }
    const SparseLU lu(a);
    const Eigen::VectorXd x = lu.solve(rhs);
    out.residual_norm = relative_residual(a, x, rhs);
    out.w = FEFunction(disc.velocity, x.head(ops.nv()));
    out.q = FEFunction(disc.pressure, x.segment(ops.nv(), ops.np()));
    out.S = FEFunction(disc.temperature, x.tail(ops.nt()));
    out.max_divergence = max_div(ops, out.w.coeffs());
    return out;
}

AdjointSolution fixed_point_adjoint(const StateSolution& state, double tol, int max_iter)
{
    if (!(tol > 0.0) || max_iter < 1) {
        throw DomainError("fixed_point_adjoint: need tol > 0 and max_iter >= 1");
    }
    const BoussinesqOperators& ops = *state.ops;
    const Discretization& disc = state.disc();
    const Linearization lin = linearize(state);
    const Eigen::VectorXd load = adjoint_load(state);

    // the Poisson solve below uses kappa K only; C2(v)^T S is lagged
    Eigen::VectorXd w = Eigen::VectorXd::Zero(ops.nv());
    Eigen::VectorXd q = Eigen::VectorXd::Zero(ops.np());
    Eigen::VectorXd s = Eigen::VectorXd::Zero(ops.nt());
    AdjointSolution out;
    bool converged = false;
    for (int k = 1; k <= max_iter; ++k) {
        const Eigen::VectorXd mom = -(lin.transport * w) - lin.coupling * s;
        const Eigen::VectorXd sol = ops.solve_stokes(mom);
        Eigen::VectorXd w_new = sol.head(ops.nv());
        q = sol.segment(ops.nv(), ops.np());
        const Eigen::VectorXd heat = load + SparseOperator(ops.buoyancy().transpose()) * w_new - lin.convection * s;
        Eigen::VectorXd s_new = ops.solve_temperature(heat);
        const double inc = picard_increment(ops, w, w_new, s, s_new);
        out.increments.push_back(inc);
        w = std::move(w_new);
        s = std::move(s_new);
        out.iterations = k;
        if (!std::isfinite(inc)) {
            break;
        }
        if (inc < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "fixed_point_adjoint: no convergence to " << tol << " in " << out.iterations << " sweeps";
        throw NonConvergenceError(msg.str(), out.increments);
    }

    Eigen::VectorXd x(ops.stokes_size() + ops.nt());
    x << w, q, 0.0, s;
    SparseOperator a = assemble_adjoint_operator(state);
    const std::vector<char> mask = adjoint_mask(ops);
    eliminate_dofs(a, mask);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
    rhs.tail(ops.nt()) = load;
    zero_dofs(rhs, mask);
    out.residual_norm = rhs.squaredNorm() == 0.0 ? (a * x).norm() : relative_residual(a, x, rhs);
    out.w = FEFunction(disc.velocity, std::move(w));
    out.q = FEFunction(disc.pressure, std::move(q));
    out.S = FEFunction(disc.temperature, std::move(s));
    out.max_divergence = max_div(ops, out.w.coeffs());
    return out;
}

} // namespace bshape
