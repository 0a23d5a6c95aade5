#pragma once

#include "bshape/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace bshape {

/// Quadrature node on the reference triangle in barycentric coordinates.
/// Weights sum to one; multiply by the element area.
struct QuadraturePoint {
    std::array<double, 3> bary;
    double weight;
};

/// Symmetric 7-point rule, exact for polynomials of degree 5.
const std::array<QuadraturePoint, 7>& degree5_rule();

/// Affine element data: area and the constant gradients of the barycentric
/// coordinates.
struct ElementGeometry {
    std::array<Point, 3> corners;
    double area = 0.0;
    std::array<std::array<double, 2>, 3> grad_bary{};

    Point map(const std::array<double, 3>& bary) const;
};

ElementGeometry element_geometry(const Mesh& mesh, int triangle);

/// Barycentric coordinates of an arbitrary point with respect to an element.
std::array<double, 3> barycentric(const ElementGeometry& geo, Point p);

/// Lagrange P2 shape functions. Local order: vertices 0,1,2 then the
/// midpoints of edges (1,2), (2,0), (0,1).
std::array<double, 6> p2_values(const std::array<double, 3>& bary);
std::array<std::array<double, 2>, 6> p2_gradients(const std::array<double, 3>& bary,
                                                  const ElementGeometry& geo);

enum class SpaceKind { ScalarP1, ScalarP2, VectorP2 };

/// Conforming Lagrange space on a Mesh. Vector spaces store component c of
/// node k at dof c*n_nodes + k. P2 nodes are numbered vertices first (same
/// indices as the mesh) and then edge midpoints.
class FunctionSpace {
public:
    FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

    SpaceKind kind() const noexcept { return kind_; }
    const Mesh& mesh() const noexcept { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }

    int components() const noexcept { return kind_ == SpaceKind::VectorP2 ? 2 : 1; }
    int n_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
    int n_dofs() const noexcept { return components() * n_nodes(); }
    int local_size() const noexcept { return kind_ == SpaceKind::ScalarP1 ? 3 : 6; }
    int dof(int node, int component) const noexcept { return component * n_nodes() + node; }

    /// Global node of local node `local` on element `triangle`.
    int node(int triangle, int local) const noexcept
    {
        return element_nodes_[static_cast<std::size_t>(triangle)][static_cast<std::size_t>(local)];
    }
    const std::vector<Point>& nodes() const noexcept { return nodes_; }

    bool on_bottom(int node) const { return bottom_[static_cast<std::size_t>(node)] != 0; }
    bool on_wall(int node) const { return wall_[static_cast<std::size_t>(node)] != 0; }
    bool on_boundary(int node) const { return on_bottom(node) || on_wall(node); }

    /// Dofs whose node lies on an edge with one of the selected tags.
    std::vector<char> dirichlet_mask(bool bottom, bool wall) const;
    std::vector<char> boundary_mask() const { return dirichlet_mask(true, true); }

private:
    std::shared_ptr<const Mesh> mesh_;
    SpaceKind kind_;
    std::vector<std::array<int, 6>> element_nodes_;
    std::vector<Point> nodes_;
    std::vector<char> bottom_;
    std::vector<char> wall_;
};

class FEFunction {
public:
    FEFunction() = default;
    explicit FEFunction(std::shared_ptr<const FunctionSpace> space);
    FEFunction(std::shared_ptr<const FunctionSpace> space, Eigen::VectorXd coeffs);

    const FunctionSpace& space() const noexcept { return *space_; }
    const std::shared_ptr<const FunctionSpace>& space_ptr() const noexcept { return space_; }
    Eigen::VectorXd& coeffs() noexcept { return coeffs_; }
    const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }

    /// Value of component `c` inside `triangle` at barycentric point `bary`.
    double value(int triangle, const std::array<double, 3>& bary, int c = 0) const;
    /// Gradient of component `c` inside `triangle`.
    std::array<double, 2> gradient(int triangle, const std::array<double, 3>& bary, int c = 0) const;

    /// Nodal values at the mesh vertices (component c).
    std::vector<double> vertex_values(int c = 0) const;
    /// Euclidean magnitude at the mesh vertices (vector spaces).
    std::vector<double> vertex_magnitude() const;

private:
    std::shared_ptr<const FunctionSpace> space_;
    Eigen::VectorXd coeffs_;
};

using ScalarField = std::function<double(Point)>;
using VectorField = std::function<std::array<double, 2>(Point)>;

FEFunction interpolate(const std::shared_ptr<const FunctionSpace>& space, const ScalarField& f);
FEFunction interpolate(const std::shared_ptr<const FunctionSpace>& space, const VectorField& f);

/// The three spaces of the Taylor-Hood / P2 temperature discretization on one
/// mesh.
struct Discretization {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const FunctionSpace> velocity;    ///< VectorP2
    std::shared_ptr<const FunctionSpace> pressure;    ///< ScalarP1
    std::shared_ptr<const FunctionSpace> temperature; ///< ScalarP2
};

Discretization make_discretization(Mesh mesh);

/// Exact integral of a P2 (or P1) scalar field over the mesh.
double integrate(const FEFunction& u);

} // namespace bshape
