#include "bshape/fem.hpp"

#include "bshape/errors.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace bshape {

const std::array<QuadraturePoint, 7>& degree5_rule()
{
    static const std::array<QuadraturePoint, 7> rule = [] {
        const double r15 = std::sqrt(15.0);
        const double a1 = (9.0 - 2.0 * r15) / 21.0;
        const double b1 = (6.0 + r15) / 21.0;
        const double w1 = (155.0 + r15) / 1200.0;
        const double a2 = (9.0 + 2.0 * r15) / 21.0;
        const double b2 = (6.0 - r15) / 21.0;
        const double w2 = (155.0 - r15) / 1200.0;
        return std::array<QuadraturePoint, 7>{{
            {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
            {{a1, b1, b1}, w1},
            {{b1, a1, b1}, w1},
            {{b1, b1, a1}, w1},
            {{a2, b2, b2}, w2},
            {{b2, a2, b2}, w2},
            {{b2, b2, a2}, w2},
        }};
    }();
    return rule;
}

Point ElementGeometry::map(const std::array<double, 3>& bary) const
{
    Point p;
    for (int i = 0; i < 3; ++i) {
        p.x += bary[static_cast<std::size_t>(i)] * corners[static_cast<std::size_t>(i)].x;
        p.y += bary[static_cast<std::size_t>(i)] * corners[static_cast<std::size_t>(i)].y;
    }
    return p;
}

ElementGeometry element_geometry(const Mesh& mesh, int triangle)
{
    ElementGeometry geo;
    const auto& tri = mesh.triangles[static_cast<std::size_t>(triangle)];
    for (int i = 0; i < 3; ++i) {
        geo.corners[static_cast<std::size_t>(i)] = mesh.vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
    }
    const Point& p0 = geo.corners[0];
    const Point& p1 = geo.corners[1];
    const Point& p2 = geo.corners[2];
    const double j11 = p1.x - p0.x;
    const double j12 = p2.x - p0.x;
    const double j21 = p1.y - p0.y;
    const double j22 = p2.y - p0.y;
    const double det = j11 * j22 - j12 * j21;
    geo.area = 0.5 * det;
    // rows of J^{-1} are the gradients of bary 1 and 2
    geo.grad_bary[1] = {j22 / det, -j12 / det};
    geo.grad_bary[2] = {-j21 / det, j11 / det};
    geo.grad_bary[0] = {-geo.grad_bary[1][0] - geo.grad_bary[2][0],
                        -geo.grad_bary[1][1] - geo.grad_bary[2][1]};
    return geo;
}

std::array<double, 3> barycentric(const ElementGeometry& geo, Point p)
{
    const Point& p0 = geo.corners[0];
    const double dx = p.x - p0.x;
    const double dy = p.y - p0.y;
    const double l1 = geo.grad_bary[1][0] * dx + geo.grad_bary[1][1] * dy;
    const double l2 = geo.grad_bary[2][0] * dx + geo.grad_bary[2][1] * dy;
    return {1.0 - l1 - l2, l1, l2};
}

std::array<double, 6> p2_values(const std::array<double, 3>& l)
{
    return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[1] * l[2], 4.0 * l[2] * l[0], 4.0 * l[0] * l[1]};
}

std::array<std::array<double, 2>, 6> p2_gradients(const std::array<double, 3>& l,
                                                  const ElementGeometry& geo)
{
    const auto& g = geo.grad_bary;
    std::array<std::array<double, 2>, 6> out{};
    for (int d = 0; d < 2; ++d) {
        const auto u = static_cast<std::size_t>(d);
        out[0][u] = (4.0 * l[0] - 1.0) * g[0][u];
        out[1][u] = (4.0 * l[1] - 1.0) * g[1][u];
        out[2][u] = (4.0 * l[2] - 1.0) * g[2][u];
        out[3][u] = 4.0 * (l[1] * g[2][u] + l[2] * g[1][u]);
        out[4][u] = 4.0 * (l[2] * g[0][u] + l[0] * g[2][u]);
        out[5][u] = 4.0 * (l[0] * g[1][u] + l[1] * g[0][u]);
    }
    return out;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

constexpr std::array<std::array<int, 2>, 3> kLocalEdges{{{1, 2}, {2, 0}, {0, 1}}};

} // namespace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), kind_(kind)
{
    const Mesh& m = *mesh_;
    const int nv = static_cast<int>(m.vertices.size());
    nodes_ = m.vertices;
    element_nodes_.resize(m.triangles.size());

    std::map<EdgeKey, BoundaryTag> boundary;
    for (const auto& e : m.boundary_edges) {
        boundary.emplace(edge_key(e.vertices[0], e.vertices[1]), e.tag);
    }
    bottom_.assign(static_cast<std::size_t>(nv), 0);
    wall_.assign(static_cast<std::size_t>(nv), 0);
    for (const auto& e : m.boundary_edges) {
        auto& flags = e.tag == BoundaryTag::Bottom ? bottom_ : wall_;
        flags[static_cast<std::size_t>(e.vertices[0])] = 1;
        flags[static_cast<std::size_t>(e.vertices[1])] = 1;
    }

    const bool quadratic = kind_ != SpaceKind::ScalarP1;
    std::map<EdgeKey, int> edge_node;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        auto& local = element_nodes_[t];
        local.fill(-1);
        for (int i = 0; i < 3; ++i) {
            local[static_cast<std::size_t>(i)] = tri[static_cast<std::size_t>(i)];
        }
        if (!quadratic) {
            continue;
        }
        for (int e = 0; e < 3; ++e) {
            const int a = tri[static_cast<std::size_t>(kLocalEdges[static_cast<std::size_t>(e)][0])];
            const int b = tri[static_cast<std::size_t>(kLocalEdges[static_cast<std::size_t>(e)][1])];
            const auto key = edge_key(a, b);
            auto it = edge_node.find(key);
            if (it == edge_node.end()) {
                const int id = static_cast<int>(nodes_.size());
                const Point& pa = m.vertices[static_cast<std::size_t>(a)];
                const Point& pb = m.vertices[static_cast<std::size_t>(b)];
                nodes_.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
                const auto bit = boundary.find(key);
                bottom_.push_back(bit != boundary.end() && bit->second == BoundaryTag::Bottom ? 1 : 0);
                wall_.push_back(bit != boundary.end() && bit->second == BoundaryTag::Wall ? 1 : 0);
                it = edge_node.emplace(key, id).first;
            }
            local[static_cast<std::size_t>(3 + e)] = it->second;
        }
    }
}

std::vector<char> FunctionSpace::dirichlet_mask(bool bottom, bool wall) const
{
    std::vector<char> mask(static_cast<std::size_t>(n_dofs()), 0);
    for (int k = 0; k < n_nodes(); ++k) {
        const bool hit = (bottom && on_bottom(k)) || (wall && on_wall(k));
        if (!hit) {
            continue;
        }
        for (int c = 0; c < components(); ++c) {
            mask[static_cast<std::size_t>(dof(k, c))] = 1;
        }
    }
    return mask;
}

FEFunction::FEFunction(std::shared_ptr<const FunctionSpace> space)
    : space_(std::move(space)), coeffs_(Eigen::VectorXd::Zero(space_->n_dofs()))
{
}

FEFunction::FEFunction(std::shared_ptr<const FunctionSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != space_->n_dofs()) {
        throw DomainError("FEFunction: coefficient length does not match the space");
    }
}

double FEFunction::value(int triangle, const std::array<double, 3>& bary, int c) const
{
    const FunctionSpace& s = *space_;
    if (s.kind() == SpaceKind::ScalarP1) {
        double v = 0.0;
        for (int i = 0; i < 3; ++i) {
            v += bary[static_cast<std::size_t>(i)] * coeffs_[s.node(triangle, i)];
        }
        return v;
    }
    const auto phi = p2_values(bary);
    double v = 0.0;
    for (int i = 0; i < 6; ++i) {
        v += phi[static_cast<std::size_t>(i)] * coeffs_[s.dof(s.node(triangle, i), c)];
    }
    return v;
}

std::array<double, 2> FEFunction::gradient(int triangle, const std::array<double, 3>& bary, int c) const
{
    const FunctionSpace& s = *space_;
    const auto geo = element_geometry(s.mesh(), triangle);
    std::array<double, 2> g{0.0, 0.0};
    if (s.kind() == SpaceKind::ScalarP1) {
        for (int i = 0; i < 3; ++i) {
            const double u = coeffs_[s.node(triangle, i)];
            g[0] += u * geo.grad_bary[static_cast<std::size_t>(i)][0];
            g[1] += u * geo.grad_bary[static_cast<std::size_t>(i)][1];
        }
        return g;
    }
    const auto dphi = p2_gradients(bary, geo);
    for (int i = 0; i < 6; ++i) {
        const double u = coeffs_[s.dof(s.node(triangle, i), c)];
        g[0] += u * dphi[static_cast<std::size_t>(i)][0];
        g[1] += u * dphi[static_cast<std::size_t>(i)][1];
    }
    return g;
}

std::vector<double> FEFunction::vertex_values(int c) const
{
    const FunctionSpace& s = *space_;
    const int nv = static_cast<int>(s.mesh().vertices.size());
    std::vector<double> out(static_cast<std::size_t>(nv));
    for (int k = 0; k < nv; ++k) {
        out[static_cast<std::size_t>(k)] = coeffs_[s.dof(k, c)];
    }
    return out;
}

std::vector<double> FEFunction::vertex_magnitude() const
{
    std::vector<double> out = vertex_values(0);
    for (int c = 1; c < space_->components(); ++c) {
        const auto comp = vertex_values(c);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = std::hypot(out[k], comp[k]);
        }
    }
    if (space_->components() == 1) {
        for (double& v : out) {
            v = std::abs(v);
        }
    }
    return out;
}

FEFunction interpolate(const std::shared_ptr<const FunctionSpace>& space, const ScalarField& f)
{
    if (space->components() != 1) {
        throw DomainError("interpolate: scalar field on a vector space");
    }
    FEFunction u(space);
    for (int k = 0; k < space->n_nodes(); ++k) {
        u.coeffs()[k] = f(space->nodes()[static_cast<std::size_t>(k)]);
    }
    return u;
}

FEFunction interpolate(const std::shared_ptr<const FunctionSpace>& space, const VectorField& f)
{
    if (space->components() != 2) {
        throw DomainError("interpolate: vector field on a scalar space");
    }
    FEFunction u(space);
    for (int k = 0; k < space->n_nodes(); ++k) {
        const auto v = f(space->nodes()[static_cast<std::size_t>(k)]);
        u.coeffs()[space->dof(k, 0)] = v[0];
        u.coeffs()[space->dof(k, 1)] = v[1];
    }
    return u;
}

Discretization make_discretization(Mesh mesh)
{
    Discretization d;
    d.mesh = std::make_shared<const Mesh>(std::move(mesh));
    d.velocity = std::make_shared<const FunctionSpace>(d.mesh, SpaceKind::VectorP2);
    d.pressure = std::make_shared<const FunctionSpace>(d.mesh, SpaceKind::ScalarP1);
    d.temperature = std::make_shared<const FunctionSpace>(d.mesh, SpaceKind::ScalarP2);
    return d;
}

double integrate(const FEFunction& u)
{
    const FunctionSpace& s = u.space();
    const Mesh& m = s.mesh();
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const double area = m.signed_area(t);
        for (const auto& q : degree5_rule()) {
            total += q.weight * area * u.value(t, q.bary);
        }
    }
    return total;
}

} // namespace bshape
