#include "bshape/errors.hpp"
#include "bshape/gradcheck.hpp"
#include "bshape/optimizer.hpp"
#include "bshape/shape_gradient.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bshape;
using bshape::testing::pi;

namespace {

std::vector<double> sampled(int n, double (*f)(double))
{
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
    }
    return v;
}

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

struct Manufactured {
    StateSolution state;
    AdjointSolution adjoint;
};

/// v = w = 0, T = T_hat = interpolant of x2, S = interpolant of
/// x1 (1 - x1) x2 (1 - x2), on the unit square.
Manufactured manufactured(int n)
{
    const Discretization disc = make_discretization(build_mesh_cells(BoundaryCurve::flat(n), n));
    Manufactured m;
    m.state.ops = std::make_shared<BoussinesqOperators>(disc, PhysicalParams{});
    m.state.v = FEFunction(disc.velocity);
    m.state.p = FEFunction(disc.pressure);
    m.state.T_hat = interpolate(disc.temperature, ScalarField([](Point p) { return p.y; }));
    m.state.T_d = FEFunction(disc.temperature);
    m.state.T = m.state.T_hat;
    m.adjoint.w = FEFunction(disc.velocity);
    m.adjoint.q = FEFunction(disc.pressure);
    m.adjoint.S = interpolate(disc.temperature,
                              ScalarField([](Point p) { return p.x * (1 - p.x) * p.y * (1 - p.y); }));
    return m;
}

} // namespace

TEST(ShapeDensity, VanishesForZeroFieldsAndConstantTemperature)
{
    PhysicalParams p;
    p.alpha = 0.0;
    const BoundaryCurve g = initial_curve(2, 8);
    auto s = solve_state(make_discretization(build_mesh_cells(g, 8)), p);
    s.T = interpolate(s.disc().temperature, ScalarField([](Point) { return 4.0; }));
    const auto a = solve_adjoint(s);
    EXPECT_LE(max_abs(shape_density_F(s, a, g)), 1e-20);
}

TEST(ShapeDensity, ManufacturedFieldsMatchSymbolicFormula)
{
    // flat bottom, n = (0, -1): dT/dn = -1, dS/dn = -x1 (1 - x1), T = 0 on the
    // bottom and I(T) = 1/2, so F = kappa x1 (1 - x1) + 1/8
    const double kappa = PhysicalParams{}.kappa();
    std::vector<double> err;
    for (int n : {8, 16}) {
        const auto m = manufactured(n);
        const BoundaryCurve g = BoundaryCurve::flat(n);
        const auto F = shape_density_F(m.state, m.adjoint, g);
        double e = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = static_cast<double>(i) / n;
            e = std::max(e, std::abs(F[static_cast<std::size_t>(i)] - (kappa * x * (1 - x) + 0.125)));
        }
        err.push_back(e);
    }
    EXPECT_LE(err[1], 2e-3);
    EXPECT_LT(err[1], err[0]);
}

TEST(ShapeDensity, FlatBottomNormalPointsDown)
{
    const auto n = bottom_normal(BoundaryCurve::flat(4), 0.3);
    EXPECT_EQ(n[0], 0.0);
    EXPECT_EQ(n[1], -1.0);
}

TEST(ShapeDensity, SymmetricAboutMidpointForSymmetricCurve)
{
    const BoundaryCurve g = bshape::testing::symmetric_curve([](double x) { return -0.1 * std::sin(3 * pi * x); }, 16);
    const auto s = solve_state(make_discretization(build_mesh_cells(g, 16)), PhysicalParams{});
    const auto a = solve_adjoint(s);
    const auto F = shape_density_F(s, a, g);
    double asym = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        asym = std::max(asym, std::abs(F[i] - F[F.size() - 1 - i]));
    }
    EXPECT_LE(asym, 1e-9);
    EXPECT_GT(max_abs(F), 0.0);
}

TEST(RegularizedGradient, ZeroForZeroDensityOnFlatCurve)
{
    const auto dj = regularized_gradient(std::vector<double>(11, 0.0), BoundaryCurve::flat(10), Penalties{});
    EXPECT_EQ(max_abs(dj), 0.0);
}

TEST(RegularizedGradient, QuadraticCurveGivesTwentyFiveHundredOne)
{
    const int n = 100;
    const BoundaryCurve g(sampled(n, [](double x) { return x * (1 - x); }));
    const Penalties pen;
    const auto dj = regularized_gradient(std::vector<double>(n + 1, 0.0), g, pen);
    // gamma'' = -2 exactly; trapezoid mean of x (1 - x) is 1/6 - 1/(6 n^2)
    const double expected = 2 * pen.lambda1 + pen.lambda2 * (1.0 / 6.0 - 1.0 / (6.0 * n * n));
    for (int i = 1; i < n; ++i) {
        EXPECT_NEAR(dj[static_cast<std::size_t>(i)], expected, 1e-9);
    }
    EXPECT_NEAR(dj[50], 2501.0, 2501.0 * 1e-3);
}

TEST(RegularizedGradient, ObstacleTermAboveThreshold)
{
    std::vector<double> v(11, 0.0);
    v[5] = 0.95;
    const Penalties pen{0.0, 0.0, 1e3, 0.1};
    const auto dj = regularized_gradient(std::vector<double>(11, 0.0), BoundaryCurve(v), pen);
    EXPECT_NEAR(dj[5], 50.0, 1e-10);
    EXPECT_EQ(dj[4], 0.0);
}

TEST(Precondition, ZeroAndConstantLoads)
{
    EXPECT_EQ(max_abs(precondition(std::vector<double>(17, 0.0))), 0.0);
    const int n = 16;
    const auto phi = precondition(std::vector<double>(n + 1, 1.0));
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        EXPECT_NEAR(phi[static_cast<std::size_t>(i)], x * (1 - x) / 2, 1e-15);
    }
    EXPECT_NEAR(phi[8], 0.125, 1e-15);
    EXPECT_THROW(precondition({1.0, 2.0}), DomainError);
}

TEST(Precondition, InvertsTheThreePointStencil)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {2, 5, 64, 257}) {
        std::vector<double> dj(static_cast<std::size_t>(n) + 1);
        for (double& x : dj) {
            x = u(rng);
        }
        const auto phi = precondition(dj);
        EXPECT_EQ(phi.front(), 0.0);
        EXPECT_EQ(phi.back(), 0.0);
        for (int i = 1; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double lap = -(phi[k - 1] - 2 * phi[k] + phi[k + 1]) * n * n;
            EXPECT_NEAR(lap, dj[k], 1e-12 * std::max(1.0, static_cast<double>(n) * n / 1e4)) << "n=" << n;
        }
    }
}

TEST(Precondition, SineLoadConvergesAtSecondOrder)
{
    std::vector<double> err;
    for (int n : {64, 128}) {
        const auto phi = precondition(sampled(n, [](double x) { return std::sin(pi * x); }));
        double e = 0.0;
        for (int i = 0; i <= n; ++i) {
            e = std::max(e, std::abs(phi[static_cast<std::size_t>(i)] - std::sin(pi * i / n) / (pi * pi)));
        }
        err.push_back(e);
    }
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
}

TEST(DirectionalDerivative, ZeroDirectionAndMeanPenalty)
{
    const int n = 20;
    const BoundaryCurve g(sampled(n, [](double x) { return 0.1 * std::sin(pi * x); }));
    const std::vector<double> zero(n + 1, 0.0);
    EXPECT_EQ(directional_derivative(std::vector<double>(n + 1, 0.3), g, Penalties{}, zero), 0.0);

    const Penalties pen{0.0, 2.0, 0.0, 0.1};
    const auto h = sampled(n, [](double x) { return x * (1 - x) * (1 + x); });
    const auto w = trapezoid_weights(n);
    double m = 0.0, ih = 0.0;
    for (int i = 0; i <= n; ++i) {
        m += w[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
        ih += w[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
    }
    EXPECT_NEAR(directional_derivative(zero, g, pen, h), pen.lambda2 * m * ih, 1e-15);
}

TEST(DirectionalDerivative, EqualsTrapezoidPairingOfRegularizedGradient)
{
    const int n = 32;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> F(n + 1), h(n + 1, 0.0);
    for (double& x : F) {
        x = u(rng);
    }
    for (int i = 1; i < n; ++i) {
        h[static_cast<std::size_t>(i)] = u(rng);
    }
    const BoundaryCurve g(sampled(n, [](double x) { return -0.1 * std::sin(5 * pi * x) * std::exp(-3 * x) + 0.9 * x * (1 - x) * 4; }));
    const Penalties pen;
    const auto dj = regularized_gradient(F, g, pen);
    const auto w = trapezoid_weights(n);
    double dot = 0.0;
    for (int i = 0; i <= n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        dot += w[k] * dj[k] * h[k];
    }
    EXPECT_NEAR(directional_derivative(F, g, pen, h), dot, 1e-12 * std::max(1.0, std::abs(dot)));
}

TEST(DirectionalDerivative, RejectsNonzeroEndpoints)
{
    const BoundaryCurve g = BoundaryCurve::flat(4);
    const std::vector<double> F(5, 0.0);
    EXPECT_THROW(directional_derivative(F, g, Penalties{}, {0.1, 0, 0, 0, 0}), DomainError);
    EXPECT_THROW(directional_derivative(F, g, Penalties{}, {0, 0, 0, 0}), DomainError);
}

TEST(OptimalityResidual, StationaryDensityAndSelfPairing)
{
    const int n = 24;
    const double lambda1 = 0.5;
    const BoundaryCurve g(sampled(n, [](double x) { return -0.05 * std::sin(2 * pi * x); }));
    const auto d2 = curve_second_difference(g);
    std::vector<double> F(n + 1);
    for (int i = 0; i <= n; ++i) {
        F[static_cast<std::size_t>(i)] = -lambda1 * d2[static_cast<std::size_t>(i)];
    }
    const std::vector<std::vector<double>> candidates = {
        sampled(n, [](double x) { return 0.2 * std::sin(pi * x); }),
        sampled(n, [](double x) { return -0.3 * x * (1 - x); }),
    };
    EXPECT_NEAR(optimality_residual(F, g, lambda1, candidates), 0.0, 1e-15);
    EXPECT_NEAR(optimality_scale(F, g, lambda1), 0.0, 1e-15);

    std::vector<double> G(n + 1, 0.7);
    EXPECT_EQ(optimality_residual(G, g, lambda1, {std::vector<double>(g.values().begin(), g.values().end())}), 0.0);
}

TEST(GradientCheck, AdjointMatchesFiniteDifferencesOnWavyCurve)
{
    GradCheckConfig cfg;
    cfg.h = 1.0 / 16;
    cfg.curve_n = 16;
    const auto res = run_gradcheck(initial_curve(2, 16), cfg);
    ASSERT_EQ(res.directions.size(), 3u);
    for (const auto& d : res.directions) {
        EXPECT_EQ(d.direction.front(), 0.0);
        EXPECT_EQ(d.direction.back(), 0.0);
        EXPECT_GT(d.adjoint * d.finite_difference, 0.0);
    }
    EXPECT_LE(res.max_rel_error(), 0.05);
}

TEST(ComputeGradient, DirectionIsFiniteAndPinned)
{
    const BoundaryCurve g = initial_curve(5, 12);
    const auto s = solve_state(make_discretization(build_mesh_cells(g, 12)), PhysicalParams{});
    const auto a = solve_adjoint(s);
    const auto gs = compute_gradient(s, a, g, Penalties{});
    ASSERT_EQ(gs.phi.size(), 13u);
    EXPECT_EQ(gs.phi.front(), 0.0);
    EXPECT_EQ(gs.phi.back(), 0.0);
    for (std::size_t i = 0; i < gs.phi.size(); ++i) {
        EXPECT_TRUE(std::isfinite(gs.F[i]) && std::isfinite(gs.DJ[i]) && std::isfinite(gs.phi[i]));
        EXPECT_DOUBLE_EQ(gs.xi[i], static_cast<double>(i) / 12);
    }
}
