#include "bshape/state.hpp"

#include "bshape/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bshape {

void PhysicalParams::validate() const
{
    if (!(Re > 0.0) || !std::isfinite(Re)) {
        throw DomainError("PhysicalParams: Re must be positive");
    }
    if (!(Pr > 0.0) || !std::isfinite(Pr)) {
        throw DomainError("PhysicalParams: Pr must be positive");
    }
    if (!(Gr >= 0.0) || !std::isfinite(Gr)) {
        throw DomainError("PhysicalParams: Gr must be non-negative");
    }
    if (!std::isfinite(alpha)) {
        throw DomainError("PhysicalParams: alpha must be finite");
    }
}

BoussinesqOperators::BoussinesqOperators(Discretization disc, const PhysicalParams& params)
    : disc_(std::move(disc)), params_(params)
{
    params_.validate();
    stokes_ = assemble_stokes(disc_, params_.Re);
    stiffness_ = assemble_scalar_stiffness(disc_);
    mass_ = assemble_scalar_mass(disc_);
    buoyancy_ = assemble_buoyancy(disc_, params_.Gr, params_.Re);
    pressure_weights_ = pressure_mean_weights(disc_);
    g1_load_ = params_.g1 ? assemble_load(disc_, params_.g1) : Eigen::VectorXd::Zero(nv());
    g2_load_ = params_.g2 ? assemble_load(disc_, params_.g2) : Eigen::VectorXd::Zero(nt());

    velocity_mask_ = disc_.velocity->boundary_mask();
    temperature_mask_ = disc_.temperature->boundary_mask();
    stokes_mask_.assign(static_cast<std::size_t>(stokes_size()), 0);
    std::copy(velocity_mask_.begin(), velocity_mask_.end(), stokes_mask_.begin());

    SparseOperator k = stokes_matrix();
    eliminate_dofs(k, stokes_mask_);
    stokes_lu_.factor(k);

    SparseOperator kt = stiffness_ * params_.kappa();
    eliminate_dofs(kt, temperature_mask_);
    temperature_lu_.factor(kt);
}

SparseOperator BoussinesqOperators::stokes_matrix() const
{
    const int n = stokes_size();
    SparseOperator k = assemble_blocks(n, n,
                                       {{0, 0, &stokes_.viscous, 1.0, false},
                                        {0, nv(), &stokes_.divergence, -1.0, true},
                                        {nv(), 0, &stokes_.divergence, -1.0, false}});
    k += border(n, nv(), nv() + np(), pressure_weights_, true);
    k.makeCompressed();
    return k;
}

Eigen::VectorXd BoussinesqOperators::solve_stokes(const Eigen::VectorXd& momentum_load) const
{
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(stokes_size());
    rhs.head(nv()) = momentum_load;
    zero_dofs(rhs, stokes_mask_);
    return stokes_lu_.solve(rhs);
}

Eigen::VectorXd BoussinesqOperators::solve_temperature(const Eigen::VectorXd& load) const
{
    Eigen::VectorXd rhs = load;
    zero_dofs(rhs, temperature_mask_);
    return temperature_lu_.solve(rhs);
}

double BoussinesqOperators::velocity_seminorm(const Eigen::VectorXd& v) const
{
    const int nn = disc_.velocity->n_nodes();
    const double a = v.head(nn).dot(stiffness_ * v.head(nn));
    const double b = v.tail(nn).dot(stiffness_ * v.tail(nn));
    return std::sqrt(std::max(a + b, 0.0));
}

double BoussinesqOperators::temperature_seminorm(const Eigen::VectorXd& t) const
{
    return std::sqrt(std::max(t.dot(stiffness_ * t), 0.0));
}

PicardUpdate picard_step(const BoussinesqOperators& ops, const Eigen::VectorXd& T_d,
                         const Eigen::VectorXd& v, const Eigen::VectorXd& T_hat)
{
    const Discretization& disc = ops.disc();
    const FEFunction vk(disc.velocity, v);
    const Eigen::VectorXd t_full = T_hat + T_d;

    Eigen::VectorXd load_v = ops.g1_load() + ops.buoyancy() * t_full;
    if (v.squaredNorm() > 0.0) {
        load_v -= assemble_convection_b1(disc, vk) * v;
    }
    PicardUpdate out;
    out.stokes = ops.solve_stokes(load_v);

    const FEFunction v_new(disc.velocity, out.stokes.head(ops.nv()));
    Eigen::VectorXd load_t = ops.g2_load() - ops.params().kappa() * (ops.stiffness() * T_d);
    if (v_new.coeffs().squaredNorm() > 0.0) {
        load_t -= assemble_convection_b2(disc, v_new) * t_full;
    }
    out.T_hat = ops.solve_temperature(load_t);
    return out;
}

double picard_increment(const BoussinesqOperators& ops, const Eigen::VectorXd& v_old,
                        const Eigen::VectorXd& v_new, const Eigen::VectorXd& t_old,
                        const Eigen::VectorXd& t_new)
{
    const double num = ops.velocity_seminorm(v_new - v_old) + ops.temperature_seminorm(t_new - t_old);
    const double den = ops.velocity_seminorm(v_new) + ops.temperature_seminorm(t_new);
    if (num == 0.0) {
        return 0.0;
    }
    if (den == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return num / den;
}

StateSolution solve_state(const Discretization& disc, const PhysicalParams& params, const PicardOptions& opts)
{
    return solve_state(std::make_shared<const BoussinesqOperators>(disc, params), opts);
}

StateSolution solve_state(std::shared_ptr<const BoussinesqOperators> ops, const PicardOptions& opts)
{
    if (!(opts.tol > 0.0) || opts.max_iter < 1) {
        throw DomainError("solve_state: need tol > 0 and max_iter >= 1");
    }
    const Discretization& disc = ops->disc();
    StateSolution s;
    s.ops = ops;
    s.T_d = interpolate_Td(disc, ops->params().alpha);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(ops->nv());
    Eigen::VectorXd t = Eigen::VectorXd::Zero(ops->nt());
    Eigen::VectorXd p = Eigen::VectorXd::Zero(ops->np());
    bool converged = false;
    for (int k = 1; k <= opts.max_iter; ++k) {
        PicardUpdate up = picard_step(*ops, s.T_d.coeffs(), v, t);
        Eigen::VectorXd v_new = up.stokes.head(ops->nv());
        const double inc = picard_increment(*ops, v, v_new, t, up.T_hat);
        s.increments.push_back(inc);
        v = std::move(v_new);
        p = up.stokes.segment(ops->nv(), ops->np());
        t = std::move(up.T_hat);
        s.max_divergence = std::max(s.max_divergence, (ops->stokes().divergence * v).cwiseAbs().maxCoeff());
        s.picard_iters = k;
        s.final_increment = inc;
        if (!std::isfinite(inc)) {
            break;
        }
        if (inc < opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "solve_state: Picard iteration did not reach " << opts.tol << " in " << s.picard_iters
            << " iterations (last increment " << s.final_increment << ")";
        throw NonConvergenceError(msg.str(), s.increments);
    }
    s.v = FEFunction(disc.velocity, std::move(v));
    s.p = FEFunction(disc.pressure, std::move(p));
    s.T = FEFunction(disc.temperature, t + s.T_d.coeffs());
    s.T_hat = FEFunction(disc.temperature, std::move(t));
    return s;
}

double mean_temperature(const FEFunction& T)
{
    return integrate(T) / T.space().mesh().total_area();
}

double variance_cost(const FEFunction& T)
{
    const double mean = mean_temperature(T);
    const Mesh& m = T.space().mesh();
    double j = 0.0;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const double area = m.signed_area(t);
        for (const auto& q : degree5_rule()) {
            const double d = T.value(t, q.bary) - mean;
            j += q.weight * area * d * d;
        }
    }
    return 0.5 * j;
}

CostBreakdown evaluate_cost(const FEFunction& T, const BoundaryCurve& curve, const Penalties& pen)
{
    CostBreakdown c;
    c.I_T = mean_temperature(T);
    c.J1 = variance_cost(T);
    const CurveIntegrals ci = curve_integrals(curve, pen.nu);
    c.curve_energy = ci.dirichlet_energy;
    c.mean_sq = ci.mean * ci.mean;
    c.obstacle = ci.obstacle;
    c.total = c.J1 + 0.5 * pen.lambda1 * c.curve_energy + 0.5 * pen.lambda2 * c.mean_sq +
              0.5 * pen.lambda3 * c.obstacle;
    return c;
}

CostBreakdown evaluate_cost(const StateSolution& state, const BoundaryCurve& curve, const Penalties& pen)
{
    return evaluate_cost(state.T, curve, pen);
}

} // namespace bshape
