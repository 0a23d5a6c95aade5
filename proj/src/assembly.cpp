#include "bshape/assembly.hpp"

#include "bshape/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace bshape {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using Grad = std::array<double, 2>;

struct ReferenceP2 {
    std::array<std::array<double, 6>, 7> phi{};
    ReferenceP2()
    {
        const auto& rule = degree5_rule();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            phi[q] = p2_values(rule[q].bary);
        }
    }
};

const ReferenceP2& reference_p2()
{
    static const ReferenceP2 ref;
    return ref;
}

/// Per-element P2 data at the 7 quadrature points.
struct ElementP2 {
    ElementGeometry geo;
    std::array<std::array<Grad, 6>, 7> dphi{};
    std::array<double, 7> jxw{};
    std::array<int, 6> nodes{};
};

void fill_element(const FunctionSpace& space, int t, ElementP2& e)
{
    e.geo = element_geometry(space.mesh(), t);
    const auto& rule = degree5_rule();
    for (std::size_t q = 0; q < rule.size(); ++q) {
        e.dphi[q] = p2_gradients(rule[q].bary, e.geo);
        e.jxw[q] = rule[q].weight * e.geo.area;
    }
    for (int i = 0; i < 6; ++i) {
        e.nodes[static_cast<std::size_t>(i)] = space.node(t, i);
    }
}

/// Value and gradient of component c of a P2 field at quadrature point q.
double field_value(const FEFunction& u, const ElementP2& e, std::size_t q, int c)
{
    const auto& phi = reference_p2().phi[q];
    double v = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        v += phi[i] * u.coeffs()[u.space().dof(e.nodes[i], c)];
    }
    return v;
}

Grad field_gradient(const FEFunction& u, const ElementP2& e, std::size_t q, int c)
{
    Grad g{0.0, 0.0};
    for (std::size_t i = 0; i < 6; ++i) {
        const double coef = u.coeffs()[u.space().dof(e.nodes[i], c)];
        g[0] += coef * e.dphi[q][i][0];
        g[1] += coef * e.dphi[q][i][1];
    }
    return g;
}

SparseOperator from_triplets(int rows, int cols, const Triplets& trips)
{
    SparseOperator m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

void require_space(const FEFunction& u, SpaceKind kind, const char* who)
{
    if (u.space().kind() != kind) {
        std::ostringstream msg;
        msg << who << ": field lives in the wrong function space";
        throw DomainError(msg.str());
    }
}

/// Scalar P2 element matrix loop; `kernel(e, q, i, j)` returns the integrand
/// without the quadrature weight.
template <typename Kernel>
SparseOperator assemble_scalar(const Discretization& disc, Kernel&& kernel)
{
    const FunctionSpace& s = *disc.temperature;
    const int nt = static_cast<int>(s.mesh().triangles.size());
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(nt) * 36);
    ElementP2 e;
    for (int t = 0; t < nt; ++t) {
        fill_element(s, t, e);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                double a = 0.0;
                for (std::size_t q = 0; q < 7; ++q) {
                    a += e.jxw[q] * kernel(e, q, i, j);
                }
                trips.emplace_back(e.nodes[i], e.nodes[j], a);
            }
        }
    }
    return from_triplets(s.n_dofs(), s.n_dofs(), trips);
}

/// Copies a scalar operator onto both diagonal blocks of a vector space.
SparseOperator block_diagonal(const SparseOperator& scalar, int n_nodes)
{
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(scalar.nonZeros()) * 2);
    for (int k = 0; k < scalar.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(scalar, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            trips.emplace_back(r, c, it.value());
            trips.emplace_back(r + n_nodes, c + n_nodes, it.value());
        }
    }
    return from_triplets(2 * n_nodes, 2 * n_nodes, trips);
}

} // namespace

SparseOperator assemble_scalar_stiffness(const Discretization& disc)
{
    return assemble_scalar(disc, [](const ElementP2& e, std::size_t q, std::size_t i, std::size_t j) {
        return e.dphi[q][i][0] * e.dphi[q][j][0] + e.dphi[q][i][1] * e.dphi[q][j][1];
    });
}

SparseOperator assemble_scalar_mass(const Discretization& disc)
{
    const auto& phi = reference_p2().phi;
    return assemble_scalar(disc, [&phi](const ElementP2&, std::size_t q, std::size_t i, std::size_t j) {
        return phi[q][i] * phi[q][j];
    });
}

SparseOperator assemble_temperature_laplacian(const Discretization& disc, double reynolds, double prandtl)
{
    if (!(reynolds > 0.0 && prandtl > 0.0)) {
        throw DomainError("assemble_temperature_laplacian: Re and Pr must be positive");
    }
    SparseOperator k = assemble_scalar_stiffness(disc);
    k *= 1.0 / (reynolds * prandtl);
    return k;
}

StokesOperators assemble_stokes(const Discretization& disc, double reynolds)
{
    if (!(reynolds > 0.0)) {
        throw DomainError("assemble_stokes: Re must be positive");
    }
    const FunctionSpace& v = *disc.velocity;
    const FunctionSpace& p = *disc.pressure;
    StokesOperators ops;
    SparseOperator k = assemble_scalar_stiffness(disc);
    k *= 1.0 / reynolds;
    ops.viscous = block_diagonal(k, v.n_nodes());

    const auto& rule = degree5_rule();
    const int nt = static_cast<int>(v.mesh().triangles.size());
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(nt) * 36);
    ElementP2 e;
    for (int t = 0; t < nt; ++t) {
        fill_element(v, t, e);
        for (std::size_t kk = 0; kk < 3; ++kk) {
            const int row = p.node(t, static_cast<int>(kk));
            for (std::size_t j = 0; j < 6; ++j) {
                for (int c = 0; c < 2; ++c) {
                    double a = 0.0;
                    for (std::size_t q = 0; q < rule.size(); ++q) {
                        a += e.jxw[q] * rule[q].bary[kk] * e.dphi[q][j][static_cast<std::size_t>(c)];
                    }
                    trips.emplace_back(row, v.dof(e.nodes[j], c), a);
                }
            }
        }
    }
    ops.divergence = from_triplets(p.n_dofs(), v.n_dofs(), trips);
    return ops;
}

SparseOperator assemble_buoyancy(const Discretization& disc, double grashof, double reynolds)
{
    if (!(reynolds > 0.0) || grashof < 0.0) {
        throw DomainError("assemble_buoyancy: need Re > 0 and Gr >= 0");
    }
    const FunctionSpace& v = *disc.velocity;
    const SparseOperator mass = assemble_scalar_mass(disc);
    const double scale = grashof / (reynolds * reynolds);
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(mass.nonZeros()));
    for (int k = 0; k < mass.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(mass, k); it; ++it) {
            trips.emplace_back(v.dof(static_cast<int>(it.row()), 1), static_cast<int>(it.col()),
                               scale * it.value());
        }
    }
    return from_triplets(v.n_dofs(), disc.temperature->n_dofs(), trips);
}

SparseOperator assemble_convection_b2(const Discretization& disc, const FEFunction& vbar)
{
    require_space(vbar, SpaceKind::VectorP2, "assemble_convection_b2");
    const auto& phi = reference_p2().phi;
    std::array<std::array<double, 2>, 7> vq{};
    int cached = -1;
    const FunctionSpace& s = *disc.temperature;
    const int nt = static_cast<int>(s.mesh().triangles.size());
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(nt) * 36);
    ElementP2 e;
    for (int t = 0; t < nt; ++t) {
        fill_element(s, t, e);
        if (cached != t) {
            for (std::size_t q = 0; q < 7; ++q) {
                vq[q] = {field_value(vbar, e, q, 0), field_value(vbar, e, q, 1)};
            }
            cached = t;
        }
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                double a = 0.0;
                for (std::size_t q = 0; q < 7; ++q) {
                    a += e.jxw[q] * (vq[q][0] * e.dphi[q][j][0] + vq[q][1] * e.dphi[q][j][1]) * phi[q][i];
                }
                trips.emplace_back(e.nodes[i], e.nodes[j], a);
            }
        }
    }
    return from_triplets(s.n_dofs(), s.n_dofs(), trips);
}

SparseOperator assemble_convection_b1(const Discretization& disc, const FEFunction& vbar)
{
    return block_diagonal(assemble_convection_b2(disc, vbar), disc.velocity->n_nodes());
}

SparseOperator assemble_reaction_b1(const Discretization& disc, const FEFunction& vbar)
{
    require_space(vbar, SpaceKind::VectorP2, "assemble_reaction_b1");
    const auto& phi = reference_p2().phi;
    const FunctionSpace& v = *disc.velocity;
    const int nt = static_cast<int>(v.mesh().triangles.size());
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(nt) * 144);
    ElementP2 e;
    std::array<std::array<Grad, 2>, 7> grad_v{};
    for (int t = 0; t < nt; ++t) {
        fill_element(v, t, e);
        for (std::size_t q = 0; q < 7; ++q) {
            grad_v[q][0] = field_gradient(vbar, e, q, 0);
            grad_v[q][1] = field_gradient(vbar, e, q, 1);
        }
        // row (i, a), column (j, b): int phi_j d_b vbar_a phi_i
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                for (std::size_t a = 0; a < 2; ++a) {
                    for (std::size_t b = 0; b < 2; ++b) {
                        double val = 0.0;
                        for (std::size_t q = 0; q < 7; ++q) {
                            val += e.jxw[q] * phi[q][j] * grad_v[q][a][b] * phi[q][i];
                        }
                        trips.emplace_back(v.dof(e.nodes[i], static_cast<int>(a)),
                                           v.dof(e.nodes[j], static_cast<int>(b)), val);
                    }
                }
            }
        }
    }
    return from_triplets(v.n_dofs(), v.n_dofs(), trips);
}

SparseOperator assemble_b2_velocity_form(const Discretization& disc, const FEFunction& tbar)
{
    require_space(tbar, SpaceKind::ScalarP2, "assemble_b2_velocity_form");
    const auto& phi = reference_p2().phi;
    const FunctionSpace& v = *disc.velocity;
    const FunctionSpace& s = *disc.temperature;
    const int nt = static_cast<int>(s.mesh().triangles.size());
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(nt) * 72);
    ElementP2 e;
    std::array<Grad, 7> grad_t{};
    for (int t = 0; t < nt; ++t) {
        fill_element(s, t, e);
        for (std::size_t q = 0; q < 7; ++q) {
            grad_t[q] = field_gradient(tbar, e, q, 0);
        }
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                for (std::size_t b = 0; b < 2; ++b) {
                    double val = 0.0;
                    for (std::size_t q = 0; q < 7; ++q) {
                        val += e.jxw[q] * phi[q][j] * grad_t[q][b] * phi[q][i];
                    }
                    trips.emplace_back(e.nodes[i], v.dof(e.nodes[j], static_cast<int>(b)), val);
                }
            }
        }
    }
    return from_triplets(s.n_dofs(), v.n_dofs(), trips);
}

Eigen::VectorXd pressure_mean_weights(const Discretization& disc)
{
    const FunctionSpace& p = *disc.pressure;
    const Mesh& m = p.mesh();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p.n_dofs());
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const double third = m.signed_area(t) / 3.0;
        for (int i = 0; i < 3; ++i) {
            w[p.node(t, i)] += third;
        }
    }
    return w;
}

Eigen::VectorXd assemble_load(const Discretization& disc, const ScalarField& f)
{
    const FunctionSpace& s = *disc.temperature;
    const auto& rule = degree5_rule();
    const auto& phi = reference_p2().phi;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(s.n_dofs());
    ElementP2 e;
    for (int t = 0; t < static_cast<int>(s.mesh().triangles.size()); ++t) {
        fill_element(s, t, e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double fq = f(e.geo.map(rule[q].bary));
            for (std::size_t i = 0; i < 6; ++i) {
                b[e.nodes[i]] += e.jxw[q] * fq * phi[q][i];
            }
        }
    }
    return b;
}

Eigen::VectorXd assemble_load(const Discretization& disc, const VectorField& f)
{
    const FunctionSpace& v = *disc.velocity;
    const auto& rule = degree5_rule();
    const auto& phi = reference_p2().phi;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(v.n_dofs());
    ElementP2 e;
    for (int t = 0; t < static_cast<int>(v.mesh().triangles.size()); ++t) {
        fill_element(v, t, e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto fq = f(e.geo.map(rule[q].bary));
            for (std::size_t i = 0; i < 6; ++i) {
                b[v.dof(e.nodes[i], 0)] += e.jxw[q] * fq[0] * phi[q][i];
                b[v.dof(e.nodes[i], 1)] += e.jxw[q] * fq[1] * phi[q][i];
            }
        }
    }
    return b;
}

FEFunction interpolate_Td(const Discretization& disc, double alpha)
{
    return interpolate(disc.temperature, ScalarField([alpha](Point p) {
        return alpha * p.x * (1.0 - p.x) * (1.0 - p.y);
    }));
}

BottomPoint locate_on_bottom(const Mesh& mesh, double xi, BottomSide side)
{
    if (!(xi >= 0.0 && xi <= 1.0)) {
        std::ostringstream msg;
        msg << "locate_on_bottom: xi = " << xi << " outside [0, 1]";
        throw DomainError(msg.str());
    }
    const int n = mesh.n_cells;
    const double s = xi * n;
    const double r = std::round(s);
    BottomPoint bp;
    int cell = 0;
    if (std::abs(s - r) < 1e-9) {
        bp.at_vertex = true;
        cell = side == BottomSide::Left ? static_cast<int>(r) - 1 : static_cast<int>(r);
    } else {
        cell = static_cast<int>(std::floor(s));
    }
    cell = std::clamp(cell, 0, n - 1);
    bp.triangle = mesh.bottom_triangle(cell);
    const auto& tri = mesh.triangles[static_cast<std::size_t>(bp.triangle)];
    const Point& left = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Point& right = mesh.vertices[static_cast<std::size_t>(tri[1])];
    double lr = (xi - left.x) / (right.x - left.x);
    if (bp.at_vertex) {
        lr = std::abs(xi - left.x) < std::abs(xi - right.x) ? 0.0 : 1.0;
    }
    bp.bary = {1.0 - lr, lr, 0.0};
    bp.point = {left.x + lr * (right.x - left.x), left.y + lr * (right.y - left.y)};
    bp.edge_slope = (right.y - left.y) / (right.x - left.x);
    return bp;
}

Eigen::MatrixXd evaluate_gradient_on_bottom(const FEFunction& u, double xi, BottomSide side)
{
    const BottomPoint bp = locate_on_bottom(u.space().mesh(), xi, side);
    const int nc = u.space().components();
    Eigen::MatrixXd g(nc, 2);
    for (int c = 0; c < nc; ++c) {
        const auto gc = u.gradient(bp.triangle, bp.bary, c);
        g(c, 0) = gc[0];
        g(c, 1) = gc[1];
    }
    return g;
}

} // namespace bshape
