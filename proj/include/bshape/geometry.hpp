#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bshape {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Bottom curve gamma of the container, stored as nodal values on the uniform
/// grid xi_i = i/N. Endpoints are clamped to zero.
class BoundaryCurve {
public:
    /// Throws DomainError on non-finite values or endpoints farther than 1e-12
    /// from zero (those are then pinned to exactly 0), GeometryError if any
    /// value reaches the lid at height 1.
    explicit BoundaryCurve(std::vector<double> values);

    /// Samples f at the N+1 grid nodes; endpoints are pinned to zero.
    static BoundaryCurve sample(const std::function<double(double)>& f, int n_intervals);
    static BoundaryCurve flat(int n_intervals);

    int n_intervals() const noexcept { return static_cast<int>(values_.size()) - 1; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double node(int i) const noexcept { return static_cast<double>(i) / n_intervals(); }
    std::vector<double> nodes() const;

private:
    std::vector<double> values_;
};

struct CurveValue {
    double value;
    double slope;
};

/// Piecewise-linear evaluation. The slope at a grid node is that of the
/// interval to its left (the first interval at xi = 0).
CurveValue curve_eval(const BoundaryCurve& curve, double xi);

/// 3-point second difference at interior nodes, zero at the clamped ends.
std::vector<double> curve_second_difference(const BoundaryCurve& curve);

struct CurveIntegrals {
    double mean = 0.0;             ///< trapezoid rule of gamma
    double dirichlet_energy = 0.0; ///< int |gamma'|^2 with piecewise-constant slopes
    double obstacle = 0.0;         ///< trapezoid rule of ((gamma - 1 + nu)^+)^2
};

CurveIntegrals curve_integrals(const BoundaryCurve& curve, double nu);

/// Trapezoid weights of the curve grid (1/(2N) at the ends, 1/N inside).
std::vector<double> trapezoid_weights(int n_intervals);

/// Outward unit normal (s, -1)/sqrt(1+s^2) of a bottom segment with slope s.
std::array<double, 2> normal_from_slope(double slope);

std::array<double, 2> bottom_normal(const BoundaryCurve& curve, double xi);

enum class BoundaryTag { Bottom, Wall };

struct BoundaryEdge {
    std::array<int, 2> vertices;
    BoundaryTag tag;
};

/// Boundary-fitted crisscross triangulation of
/// { 0 < x1 < 1, gamma(x1) < x2 < 1 }.
///
/// Grid vertex (i, j) has index j*(n+1)+i, the centre of cell (i, j) has index
/// (n+1)^2 + j*n + i. Each cell carries four triangles in the order bottom,
/// right, top, left, all sharing the centre as their third vertex.
struct Mesh {
    int n_cells = 0;
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges; ///< one counter-clockwise loop
    std::vector<int> bottom_trace;            ///< bottom vertices, left to right
    std::vector<double> bottom_xi;            ///< abscissae of bottom_trace

    int grid_vertex(int i, int j) const noexcept { return j * (n_cells + 1) + i; }
    int centre_vertex(int i, int j) const noexcept
    {
        return (n_cells + 1) * (n_cells + 1) + j * n_cells + i;
    }
    int cell_triangle(int i, int j, int k) const noexcept { return 4 * (j * n_cells + i) + k; }
    /// Triangle of bottom cell i adjacent to the bottom boundary.
    int bottom_triangle(int i) const noexcept { return cell_triangle(i, 0, 0); }

    double signed_area(int triangle) const;
    double total_area() const;
};

/// Number of cells per direction used for mesh size h: ceil(1/h).
int cells_for_mesh_size(double h);

/// Mesh nodes are the image of a uniform unit-square grid under the vertical
/// shear (s, t) -> (s, gamma(s) + t (1 - gamma(s))).
Mesh build_mesh(const BoundaryCurve& curve, double h);
Mesh build_mesh_cells(const BoundaryCurve& curve, int n_cells);

} // namespace bshape
