#pragma once

#include "bshape/state.hpp"

namespace bshape {

struct AdjointSolution {
    FEFunction w; ///< VectorP2, zero on the boundary
    FEFunction q; ///< ScalarP1, zero mean
    FEFunction S; ///< ScalarP2, zero on the boundary
    double residual_norm = 0.0;  ///< relative residual of the assembled system
    double max_divergence = 0.0; ///< ||B_div w||_inf
    int iterations = 1;
    std::vector<double> increments; ///< fixed-point variant only
};

/// Load of the S equation: (T - I(T), phi) on ScalarP2.
Eigen::VectorXd adjoint_load(const StateSolution& state);

/// Transpose of the state Jacobian with respect to (v, p, multiplier, T_hat),
/// linearized at `state`, before Dirichlet elimination. Unknown layout is
/// [w | q | multiplier | S].
SparseOperator assemble_adjoint_operator(const StateSolution& state);

/// One sparse direct solve of the coupled adjoint system. Throws SolverError
/// if the factorization fails.
AdjointSolution solve_adjoint(const StateSolution& state);

/// Same system solved by the fixed-point map that alternates a Stokes solve
/// for (w, q) and a Poisson solve for S with the coupling terms lagged.
/// Throws NonConvergenceError after max_iter sweeps.
AdjointSolution fixed_point_adjoint(const StateSolution& state, double tol = 1e-12, int max_iter = 200);

} // namespace bshape
