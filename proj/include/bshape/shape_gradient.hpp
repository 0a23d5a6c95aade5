#pragma once

#include "bshape/adjoint.hpp"

#include <vector>

namespace bshape {

struct GradientSample {
    std::vector<double> xi;
    std::vector<double> F;   ///< shape-gradient density
    std::vector<double> DJ;  ///< regularized gradient
    std::vector<double> phi; ///< preconditioned direction, -phi'' = DJ
};

/// Density F(xi) = (1/Re) dv/dn . dw/dn + (1/(Re Pr)) dT_hat/dn dS/dn
/// + 1/2 (T - I)^2 at the curve nodes. At a mesh vertex the two adjacent
/// bottom triangles are averaged, each with the normal of its own edge.
std::vector<double> shape_density_F(const StateSolution& state, const AdjointSolution& adjoint,
                                    const BoundaryCurve& curve);

/// DJ = -F - lambda1 gamma'' + lambda2 mean(gamma) + lambda3 (gamma - 1 + nu)^+.
std::vector<double> regularized_gradient(const std::vector<double>& F, const BoundaryCurve& curve,
                                         const Penalties& pen);

/// Solves the 3-point finite-difference problem -phi'' = DJ, phi(0) = phi(1) = 0.
std::vector<double> precondition(const std::vector<double>& DJ);

/// Trapezoid pairing of DJ with a direction that vanishes at both ends.
/// Throws DomainError for a nonzero endpoint value or a length mismatch.
double directional_derivative(const std::vector<double>& F, const BoundaryCurve& curve,
                              const Penalties& pen, const std::vector<double>& h);

/// Most negative value of int (F + lambda1 gamma'') (gamma - h) over the
/// candidates (trapezoid rule).
double optimality_residual(const std::vector<double>& F, const BoundaryCurve& curve, double lambda1,
                           const std::vector<std::vector<double>>& candidates);
/// max |F + lambda1 gamma''| over the interior nodes.
double optimality_scale(const std::vector<double>& F, const BoundaryCurve& curve, double lambda1);

GradientSample compute_gradient(const StateSolution& state, const AdjointSolution& adjoint,
                                const BoundaryCurve& curve, const Penalties& pen);

} // namespace bshape
