#include "bshape/geometry.hpp"

#include "bshape/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bshape {

BoundaryCurve::BoundaryCurve(std::vector<double> values) : values_(std::move(values))
{
    if (values_.size() < 2) {
        throw DomainError("BoundaryCurve: need at least one interval");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "BoundaryCurve: non-finite value at node " << i;
            throw DomainError(msg.str());
        }
    }
    if (std::abs(values_.front()) > 1e-12 || std::abs(values_.back()) > 1e-12) {
        throw DomainError("BoundaryCurve: endpoints must vanish");
    }
    values_.front() = 0.0;
    values_.back() = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] >= 1.0) {
            const double xi = static_cast<double>(i) / static_cast<double>(values_.size() - 1);
            std::ostringstream msg;
            msg << "BoundaryCurve: gamma(" << xi << ") = " << values_[i] << " reaches the lid";
            throw GeometryError(msg.str(), xi);
        }
    }
}

BoundaryCurve BoundaryCurve::sample(const std::function<double(double)>& f, int n_intervals)
{
    if (n_intervals < 1) {
        throw DomainError("BoundaryCurve::sample: n_intervals must be positive");
    }
    std::vector<double> v(static_cast<std::size_t>(n_intervals) + 1);
    for (int i = 0; i <= n_intervals; ++i) {
        v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n_intervals);
    }
    v.front() = 0.0;
    v.back() = 0.0;
    return BoundaryCurve(std::move(v));
}

BoundaryCurve BoundaryCurve::flat(int n_intervals)
{
    return sample([](double) { return 0.0; }, n_intervals);
}

std::vector<double> BoundaryCurve::nodes() const
{
    std::vector<double> xi(values_.size());
    for (int i = 0; i <= n_intervals(); ++i) {
        xi[static_cast<std::size_t>(i)] = node(i);
    }
    return xi;
}

CurveValue curve_eval(const BoundaryCurve& curve, double xi)
{
    if (!(xi >= 0.0 && xi <= 1.0)) {
        std::ostringstream msg;
        msg << "curve_eval: xi = " << xi << " outside [0, 1]";
        throw DomainError(msg.str());
    }
    const int n = curve.n_intervals();
    const double s = xi * n;
    // interval k covers [k/N, (k+1)/N]; nodes belong to the interval on their left
    int k = static_cast<int>(std::ceil(s - 1e-9)) - 1;
    k = std::clamp(k, 0, n - 1);
    const double left = curve[static_cast<std::size_t>(k)];
    const double right = curve[static_cast<std::size_t>(k) + 1];
    const double slope = (right - left) * n;
    const double t = s - k;
    return {left + t * (right - left), slope};
}

std::vector<double> curve_second_difference(const BoundaryCurve& curve)
{
    const int n = curve.n_intervals();
    std::vector<double> d2(static_cast<std::size_t>(n) + 1, 0.0);
    const double n2 = static_cast<double>(n) * n;
    for (int i = 1; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        d2[u] = (curve[u - 1] - 2.0 * curve[u] + curve[u + 1]) * n2;
    }
    return d2;
}

std::vector<double> trapezoid_weights(int n_intervals)
{
    std::vector<double> w(static_cast<std::size_t>(n_intervals) + 1, 1.0 / n_intervals);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

CurveIntegrals curve_integrals(const BoundaryCurve& curve, double nu)
{
    const int n = curve.n_intervals();
    const auto w = trapezoid_weights(n);
    CurveIntegrals out;
    for (int i = 0; i <= n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out.mean += w[u] * curve[u];
        const double plus = std::max(curve[u] - 1.0 + nu, 0.0);
        out.obstacle += w[u] * plus * plus;
    }
    for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double slope = (curve[u + 1] - curve[u]) * n;
        out.dirichlet_energy += slope * slope / n;
    }
    return out;
}

std::array<double, 2> normal_from_slope(double slope)
{
    const double inv = 1.0 / std::sqrt(1.0 + slope * slope);
    return {slope * inv, -inv};
}

std::array<double, 2> bottom_normal(const BoundaryCurve& curve, double xi)
{
    return normal_from_slope(curve_eval(curve, xi).slope);
}

double Mesh::signed_area(int triangle) const
{
    const auto& t = triangles[static_cast<std::size_t>(triangle)];
    const Point& a = vertices[static_cast<std::size_t>(t[0])];
    const Point& b = vertices[static_cast<std::size_t>(t[1])];
    const Point& c = vertices[static_cast<std::size_t>(t[2])];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::total_area() const
{
    double area = 0.0;
    for (int k = 0; k < static_cast<int>(triangles.size()); ++k) {
        area += signed_area(k);
    }
    return area;
}

int cells_for_mesh_size(double h)
{
    if (!(h > 0.0 && h <= 0.5)) {
        std::ostringstream msg;
        msg << "mesh size h = " << h << " outside (0, 0.5]";
        throw DomainError(msg.str());
    }
    return static_cast<int>(std::ceil(1.0 / h - 1e-9));
}

Mesh build_mesh(const BoundaryCurve& curve, double h)
{
    return build_mesh_cells(curve, cells_for_mesh_size(h));
}

Mesh build_mesh_cells(const BoundaryCurve& curve, int n)
{
    if (n < 1) {
        throw DomainError("build_mesh: need at least one cell per direction");
    }
    Mesh mesh;
    mesh.n_cells = n;
    const int n_grid = (n + 1) * (n + 1);
    mesh.vertices.resize(static_cast<std::size_t>(n_grid + n * n));

    auto shear = [&](double s, double t) {
        const double g = curve_eval(curve, s).value;
        if (1.0 - g < 1e-8) {
            std::ostringstream msg;
            msg << "build_mesh: degenerate column at xi = " << s << " (gamma = " << g << ")";
            throw GeometryError(msg.str(), s);
        }
        return Point{s, t == 1.0 ? 1.0 : g + t * (1.0 - g)};
    };

    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double s = static_cast<double>(i) / n;
            const double t = static_cast<double>(j) / n;
            mesh.vertices[static_cast<std::size_t>(mesh.grid_vertex(i, j))] = shear(s, t);
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double s = (i + 0.5) / n;
            const double t = (j + 0.5) / n;
            mesh.vertices[static_cast<std::size_t>(mesh.centre_vertex(i, j))] = shear(s, t);
        }
    }

    mesh.triangles.reserve(static_cast<std::size_t>(4 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int bl = mesh.grid_vertex(i, j);
            const int br = mesh.grid_vertex(i + 1, j);
            const int tr = mesh.grid_vertex(i + 1, j + 1);
            const int tl = mesh.grid_vertex(i, j + 1);
            const int c = mesh.centre_vertex(i, j);
            mesh.triangles.push_back({bl, br, c});
            mesh.triangles.push_back({br, tr, c});
            mesh.triangles.push_back({tr, tl, c});
            mesh.triangles.push_back({tl, bl, c});
        }
    }
    for (int k = 0; k < static_cast<int>(mesh.triangles.size()); ++k) {
        if (!(mesh.signed_area(k) > 0.0)) {
            const int cell = k / 4;
            const double xi = (cell % n + 0.5) / n;
            std::ostringstream msg;
            msg << "build_mesh: inverted triangle " << k << " near xi = " << xi;
            throw GeometryError(msg.str(), xi);
        }
    }

    for (int i = 0; i < n; ++i) {
        mesh.boundary_edges.push_back({{mesh.grid_vertex(i, 0), mesh.grid_vertex(i + 1, 0)}, BoundaryTag::Bottom});
    }
    for (int j = 0; j < n; ++j) {
        mesh.boundary_edges.push_back({{mesh.grid_vertex(n, j), mesh.grid_vertex(n, j + 1)}, BoundaryTag::Wall});
    }
    for (int i = n; i > 0; --i) {
        mesh.boundary_edges.push_back({{mesh.grid_vertex(i, n), mesh.grid_vertex(i - 1, n)}, BoundaryTag::Wall});
    }
    for (int j = n; j > 0; --j) {
        mesh.boundary_edges.push_back({{mesh.grid_vertex(0, j), mesh.grid_vertex(0, j - 1)}, BoundaryTag::Wall});
    }

    for (int i = 0; i <= n; ++i) {
        mesh.bottom_trace.push_back(mesh.grid_vertex(i, 0));
        mesh.bottom_xi.push_back(static_cast<double>(i) / n);
    }
    return mesh;
}

} // namespace bshape
