#pragma once

#include "bshape/shape_gradient.hpp"

#include <cstdint>
#include <vector>

namespace bshape {

/// Full penalized cost of a curve: mesh, Picard state solve, cost.
CostBreakdown reduced_cost(const BoundaryCurve& curve, double h, const PhysicalParams& params,
                           const Penalties& pen, const PicardOptions& picard = {});

struct GradCheckConfig {
    double h = 1.0 / 64.0;
    int curve_n = 64;
    double fd_step = 1e-4;
    int n_dirs = 3;
    std::uint64_t seed = 20240611;
    PhysicalParams physical;
    Penalties penalties;
    PicardOptions picard{1e-13, 200};
};

struct DirectionCheck {
    std::vector<double> direction;
    double adjoint = 0.0;
    double finite_difference = 0.0;
    double rel_error = 0.0;
};

struct GradCheckResult {
    double h = 0.0;
    int curve_n = 0;
    std::vector<DirectionCheck> directions;
    double max_rel_error() const;
};

/// Smooth random directions sum_{k=1..3} c_k sin(k pi xi) sampled on the
/// curve grid, with c_1 and c_3 bounded away from zero.
std::vector<std::vector<double>> random_directions(int curve_n, int count, std::uint64_t seed);

/// Compares directional_derivative of the adjoint gradient with central
/// differences of reduced_cost along the directions.
GradCheckResult run_gradcheck(const BoundaryCurve& curve, const GradCheckConfig& cfg);

} // namespace bshape
