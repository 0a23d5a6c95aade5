#pragma once

#include "bshape/fem.hpp"

#include <Eigen/SparseCore>

#include <array>

namespace bshape {

using SparseOperator = Eigen::SparseMatrix<double>;

struct StokesOperators {
    SparseOperator viscous;    ///< (1/Re)(grad v, grad phi) on VectorP2
    SparseOperator divergence; ///< (q, div v): rows ScalarP1, columns VectorP2
};

StokesOperators assemble_stokes(const Discretization& disc, double reynolds);

/// Unscaled (grad u, grad phi) on the P2 temperature space.
SparseOperator assemble_scalar_stiffness(const Discretization& disc);
/// (u, phi) on the P2 temperature space.
SparseOperator assemble_scalar_mass(const Discretization& disc);

/// (1/(Re Pr)) (grad T, grad phi).
SparseOperator assemble_temperature_laplacian(const Discretization& disc, double reynolds, double prandtl);

/// T -> (Gr/Re^2) (T e, phi) with e = (0, 1): rows VectorP2, columns ScalarP2.
SparseOperator assemble_buoyancy(const Discretization& disc, double grashof, double reynolds);

/// w -> b1(vbar, w, .) on VectorP2.
SparseOperator assemble_convection_b1(const Discretization& disc, const FEFunction& vbar);
/// w -> b1(w, vbar, .) on VectorP2.
SparseOperator assemble_reaction_b1(const Discretization& disc, const FEFunction& vbar);
/// T -> b2(vbar, T, .) on ScalarP2.
SparseOperator assemble_convection_b2(const Discretization& disc, const FEFunction& vbar);
/// phi -> b2(phi, Tbar, .): rows ScalarP2, columns VectorP2.
SparseOperator assemble_b2_velocity_form(const Discretization& disc, const FEFunction& tbar);

/// Entries int psi_k for the P1 pressure basis (zero-mean constraint row).
Eigen::VectorXd pressure_mean_weights(const Discretization& disc);

/// (f, phi) on ScalarP2 and (f, phi) on VectorP2.
Eigen::VectorXd assemble_load(const Discretization& disc, const ScalarField& f);
Eigen::VectorXd assemble_load(const Discretization& disc, const VectorField& f);

/// P2 interpolant of T_d(x1, x2) = alpha x1 (1 - x1) (1 - x2).
FEFunction interpolate_Td(const Discretization& disc, double alpha);

enum class BottomSide { Left, Right };

/// Gradient of a P2 field at (xi, gamma_h(xi)) evaluated in the triangle
/// attached to the bottom edge containing xi. At a vertex abscissa the
/// edge on the `side` of the vertex is used. Row c holds the gradient of
/// component c.
Eigen::MatrixXd evaluate_gradient_on_bottom(const FEFunction& u, double xi,
                                            BottomSide side = BottomSide::Left);

/// Location of (xi, gamma_h(xi)) on the bottom boundary of the mesh.
struct BottomPoint {
    int triangle = 0;
    std::array<double, 3> bary{};
    Point point;
    double edge_slope = 0.0;
    bool at_vertex = false;
};

BottomPoint locate_on_bottom(const Mesh& mesh, double xi, BottomSide side = BottomSide::Left);

} // namespace bshape
