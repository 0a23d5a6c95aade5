#pragma once

#include "bshape/assembly.hpp"
#include "bshape/linear_solver.hpp"

#include <memory>
#include <vector>

namespace bshape {

/// Nondimensional groups and data of the steady Boussinesq problem.
struct PhysicalParams {
    double Re = 1.0;
    double Pr = 0.7;
    double Gr = 1.0;
    double alpha = 10.0; ///< amplitude of the ambient temperature T_d
    VectorField g1;      ///< body force; empty means zero
    ScalarField g2;      ///< heat source; empty means zero

    /// Throws DomainError unless Re, Pr > 0 and Gr >= 0.
    void validate() const;
    double kappa() const noexcept { return 1.0 / (Re * Pr); }
    double buoyancy() const noexcept { return Gr / (Re * Re); }
};

struct PicardOptions {
    double tol = 1e-10;
    int max_iter = 100;
};

/// Operators and factorizations that do not change during a Picard solve on
/// a fixed mesh. Shared by the state and adjoint solvers.
class BoussinesqOperators {
public:
    BoussinesqOperators(Discretization disc, const PhysicalParams& params);

    const Discretization& disc() const noexcept { return disc_; }
    const PhysicalParams& params() const noexcept { return params_; }

    int nv() const noexcept { return disc_.velocity->n_dofs(); }
    int np() const noexcept { return disc_.pressure->n_dofs(); }
    int nt() const noexcept { return disc_.temperature->n_dofs(); }
    /// Size of the gauge-fixed Stokes system [v | p | multiplier].
    int stokes_size() const noexcept { return nv() + np() + 1; }

    const StokesOperators& stokes() const noexcept { return stokes_; }
    const SparseOperator& stiffness() const noexcept { return stiffness_; }
    const SparseOperator& mass() const noexcept { return mass_; }
    const SparseOperator& buoyancy() const noexcept { return buoyancy_; }
    const Eigen::VectorXd& pressure_weights() const noexcept { return pressure_weights_; }
    const Eigen::VectorXd& g1_load() const noexcept { return g1_load_; }
    const Eigen::VectorXd& g2_load() const noexcept { return g2_load_; }
    const std::vector<char>& velocity_mask() const noexcept { return velocity_mask_; }
    const std::vector<char>& temperature_mask() const noexcept { return temperature_mask_; }
    const std::vector<char>& stokes_mask() const noexcept { return stokes_mask_; }

    /// Unscaled gauge-fixed Stokes matrix [[A, -B^T, 0], [-B, 0, m], [0, m^T, 0]]
    /// before Dirichlet elimination.
    SparseOperator stokes_matrix() const;

    const SparseLU& stokes_lu() const noexcept { return stokes_lu_; }
    const SparseLU& temperature_lu() const noexcept { return temperature_lu_; }

    /// Solves the eliminated Stokes system for a momentum load (length nv);
    /// returns [v | p | multiplier].
    Eigen::VectorXd solve_stokes(const Eigen::VectorXd& momentum_load) const;
    /// Solves kappa K T = load with homogeneous Dirichlet data on all boundary dofs.
    Eigen::VectorXd solve_temperature(const Eigen::VectorXd& load) const;

    /// H1 seminorms used for increments.
    double velocity_seminorm(const Eigen::VectorXd& v) const;
    double temperature_seminorm(const Eigen::VectorXd& t) const;

private:
    Discretization disc_;
    PhysicalParams params_;
    StokesOperators stokes_;
    SparseOperator stiffness_;
    SparseOperator mass_;
    SparseOperator buoyancy_;
    Eigen::VectorXd pressure_weights_;
    Eigen::VectorXd g1_load_;
    Eigen::VectorXd g2_load_;
    std::vector<char> velocity_mask_;
    std::vector<char> temperature_mask_;
    std::vector<char> stokes_mask_;
    SparseLU stokes_lu_;
    SparseLU temperature_lu_;
};

struct StateSolution {
    std::shared_ptr<const BoussinesqOperators> ops;
    FEFunction v;     ///< VectorP2, zero on the boundary
    FEFunction p;     ///< ScalarP1, zero mean
    FEFunction T_hat; ///< ScalarP2, zero on the boundary
    FEFunction T_d;   ///< ScalarP2 interpolant of the ambient temperature
    FEFunction T;     ///< T_hat + T_d
    int picard_iters = 0;
    double final_increment = 0.0;
    std::vector<double> increments;
    double max_divergence = 0.0; ///< max over iterations of ||B_div v||_inf

    const Discretization& disc() const noexcept { return ops->disc(); }
};

/// One application of the fixed-point map: Stokes solve with the convective
/// and buoyancy terms frozen at (v, T_hat), followed by the temperature solve
/// with the new velocity. Returns [v | p | multiplier] and T_hat.
struct PicardUpdate {
    Eigen::VectorXd stokes;
    Eigen::VectorXd T_hat;
};
PicardUpdate picard_step(const BoussinesqOperators& ops, const Eigen::VectorXd& T_d,
                         const Eigen::VectorXd& v, const Eigen::VectorXd& T_hat);

/// Relative combined H1-seminorm increment between two iterates.
double picard_increment(const BoussinesqOperators& ops, const Eigen::VectorXd& v_old,
                        const Eigen::VectorXd& v_new, const Eigen::VectorXd& t_old,
                        const Eigen::VectorXd& t_new);

/// Picard iteration from (v, T_hat) = (0, 0). Throws NonConvergenceError with
/// the increment history when max_iter is exceeded.
StateSolution solve_state(const Discretization& disc, const PhysicalParams& params,
                          const PicardOptions& opts = {});
StateSolution solve_state(std::shared_ptr<const BoussinesqOperators> ops, const PicardOptions& opts = {});

/// Integral of T over the mesh divided by the mesh area.
double mean_temperature(const FEFunction& T);

/// Penalty weights of the curve terms of the cost.
struct Penalties {
    double lambda1 = 0.5;
    double lambda2 = 1.5e4;
    double lambda3 = 1e3;
    double nu = 0.1;
};

struct CostBreakdown {
    double J1 = 0.0; ///< 1/2 int (T - I)^2
    double curve_energy = 0.0;
    double mean_sq = 0.0;
    double obstacle = 0.0;
    double total = 0.0;
    double I_T = 0.0;
};

double variance_cost(const FEFunction& T);
CostBreakdown evaluate_cost(const StateSolution& state, const BoundaryCurve& curve, const Penalties& pen);
/// Same as evaluate_cost for an arbitrary temperature field.
CostBreakdown evaluate_cost(const FEFunction& T, const BoundaryCurve& curve, const Penalties& pen);

} // namespace bshape
