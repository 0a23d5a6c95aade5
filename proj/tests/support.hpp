#pragma once

#include "bshape/fem.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace bshape::testing {

inline constexpr double pi = std::numbers::pi;

/// Curve sampled from f on n intervals, then forced exactly symmetric about
/// xi = 1/2 so that mirrored meshes match bit for bit.
template <class F>
BoundaryCurve symmetric_curve(F f, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
    }
    v.front() = v.back() = 0.0;
    for (int i = 0; i <= n / 2; ++i) {
        v[static_cast<std::size_t>(n - i)] = v[static_cast<std::size_t>(i)];
    }
    return BoundaryCurve(std::move(v));
}

/// mirror[k] is the node at (1 - x, y) of node k; -1 when no such node.
inline std::vector<int> mirror_nodes(const FunctionSpace& space)
{
    auto key = [](double x, double y) {
        return std::make_pair(std::llround(x * 1e9), std::llround(y * 1e9));
    };
    std::map<std::pair<long long, long long>, int> index;
    const auto& nodes = space.nodes();
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
        index[key(nodes[static_cast<std::size_t>(k)].x, nodes[static_cast<std::size_t>(k)].y)] = k;
    }
    std::vector<int> mirror(nodes.size(), -1);
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
        const auto it = index.find(key(1.0 - nodes[static_cast<std::size_t>(k)].x, nodes[static_cast<std::size_t>(k)].y));
        if (it != index.end()) {
            mirror[static_cast<std::size_t>(k)] = it->second;
        }
    }
    return mirror;
}

/// Discrete H1 seminorm sqrt(u^T K u) for a stiffness matrix K.
template <class Sparse, class Vec>
double seminorm(const Sparse& k, const Vec& u)
{
    return std::sqrt(std::max(0.0, u.dot(k * u)));
}

} // namespace bshape::testing
