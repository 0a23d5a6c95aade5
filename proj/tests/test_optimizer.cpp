#include "bshape/errors.hpp"
#include "bshape/optimizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bshape;

namespace {

OptimizerConfig coarse()
{
    OptimizerConfig cfg;
    cfg.h = 0.125;
    cfg.snapshot_stride = 1;
    return cfg;
}

std::vector<double> vec(const BoundaryCurve& c)
{
    return {c.values().begin(), c.values().end()};
}

template <class F>
void expect_domain_error_naming(F f, const std::string& key)
{
    try {
        f();
        FAIL() << "expected DomainError naming " << key;
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
}

} // namespace

TEST(OptimizerConfig, DefaultsAreTheReferenceParameters)
{
    const OptimizerConfig cfg;
    EXPECT_EQ(cfg.physical.Re, 1.0);
    EXPECT_EQ(cfg.physical.Pr, 0.7);
    EXPECT_EQ(cfg.physical.Gr, 1.0);
    EXPECT_EQ(cfg.physical.alpha, 10.0);
    EXPECT_EQ(cfg.penalties.lambda1, 0.5);
    EXPECT_EQ(cfg.penalties.lambda2, 1.5e4);
    EXPECT_EQ(cfg.penalties.lambda3, 1e3);
    EXPECT_EQ(cfg.penalties.nu, 0.1);
    EXPECT_EQ(cfg.tau, 1e-3);
    EXPECT_EQ(cfg.h, 0.03);
    EXPECT_EQ(cfg.stop_tol, 1e-7);
    EXPECT_EQ(cfg.resolved_curve_n(), 34);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(OptimizerConfig, ValidationNamesTheOffendingField)
{
    OptimizerConfig cfg;
    cfg.tau = 0.0;
    expect_domain_error_naming([&] { cfg.validate(); }, "tau");
    cfg = {};
    cfg.stop_tol = -1.0;
    expect_domain_error_naming([&] { cfg.validate(); }, "stop_tol");
    cfg = {};
    cfg.h = 0.7;
    expect_domain_error_naming([&] { cfg.validate(); }, "h");
    cfg = {};
    cfg.penalties.nu = 1.0;
    expect_domain_error_naming([&] { cfg.validate(); }, "nu");
    cfg = {};
    cfg.preset = 6;
    expect_domain_error_naming([&] { cfg.validate(); }, "case");
}

TEST(InitialCurve, PresetsAndErrors)
{
    using std::numbers::pi;
    EXPECT_EQ(initial_curve(5, 40)[0], 0.0);
    EXPECT_EQ(vec(initial_curve(1, 10)), std::vector<double>(11, 0.0));
    EXPECT_NEAR(initial_curve(2, 12)[2], -0.1 * std::sin(3 * pi / 6), 1e-16);
    EXPECT_NEAR(initial_curve(4, 14)[1], -0.01 * std::sin(7 * pi / 14), 1e-17);
    // analytic Dirichlet energy of -0.1 sin(5 pi x): 0.01 (5 pi)^2 / 2
    const double e3 = curve_integrals(initial_curve(3, 200), 0.1).dirichlet_energy;
    EXPECT_NEAR(e3, 0.01 * 25 * pi * pi / 2, 0.01 * 1.2337);
    EXPECT_NEAR(e3, 1.20756, 0.03 * 1.20756);
    EXPECT_THROW(initial_curve(0, 10), DomainError);
    EXPECT_THROW(initial_curve(6, 10), DomainError);
    EXPECT_THROW(run_case(9, coarse()), DomainError);
}

TEST(Descend, RejectsCurveOnTheWrongGrid)
{
    EXPECT_THROW(descend(BoundaryCurve::flat(5), coarse()), DomainError);
}

TEST(Descend, CaseOneTraceInvariants)
{
    OptimizerConfig cfg = coarse();
    cfg.max_iters = 8;
    int calls = 0;
    int snaps = 0;
    const auto res = run_case(1, cfg, [&](const IterationRecord& r, const BoundaryCurve* s) {
        EXPECT_EQ(r.iter, calls);
        ++calls;
        snaps += s != nullptr ? 1 : 0;
    });
    ASSERT_EQ(res.trace.records.size(), 8u);
    EXPECT_EQ(calls, 8);
    EXPECT_EQ(snaps, 8);
    EXPECT_FALSE(res.converged);
    ASSERT_TRUE(res.trace.config.preset.has_value());
    EXPECT_EQ(*res.trace.config.preset, 1);
    const Penalties& pen = cfg.penalties;
    for (std::size_t k = 0; k < res.trace.records.size(); ++k) {
        const auto& r = res.trace.records[k];
        EXPECT_EQ(r.iter, static_cast<int>(k));
        EXPECT_NEAR(r.total,
                    r.J1 + 0.5 * pen.lambda1 * r.curve_energy + 0.5 * pen.lambda2 * r.mean_sq +
                        0.5 * pen.lambda3 * r.obstacle,
                    1e-14);
        EXPECT_LE(std::sqrt(r.mean_sq), 1e-3);
        if (k > 0) {
            EXPECT_LT(r.total, res.trace.records[k - 1].total);
            EXPECT_GE(r.wallclock_s, res.trace.records[k - 1].wallclock_s);
        }
    }
    ASSERT_EQ(res.trace.snapshots.size(), 8u);
    for (const auto& [iter, curve] : res.trace.snapshots) {
        EXPECT_EQ(curve[0], 0.0);
        EXPECT_EQ(curve[static_cast<std::size_t>(curve.n_intervals())], 0.0);
        for (int i = 0; i <= curve.n_intervals(); ++i) {
            EXPECT_NEAR(curve[static_cast<std::size_t>(i)],
                        curve[static_cast<std::size_t>(curve.n_intervals() - i)], 1e-8)
                << "iter " << iter;
        }
    }
    EXPECT_EQ(res.curve[0], 0.0);
    EXPECT_EQ(res.curve[8], 0.0);
}

TEST(Descend, SnapshotStrideSelectsSubsetOfRecords)
{
    OptimizerConfig cfg = coarse();
    cfg.max_iters = 7;
    cfg.snapshot_stride = 3;
    const auto res = run_case(2, cfg);
    ASSERT_EQ(res.trace.snapshots.size(), 3u);
    EXPECT_EQ(res.trace.snapshots[0].first, 0);
    EXPECT_EQ(res.trace.snapshots[1].first, 3);
    EXPECT_EQ(res.trace.snapshots[2].first, 6);
}

TEST(Descend, ZeroIterationsEvaluatesOnce)
{
    OptimizerConfig cfg = coarse();
    cfg.max_iters = 0;
    const auto res = run_case(3, cfg);
    EXPECT_EQ(res.trace.records.size(), 1u);
    EXPECT_EQ(vec(res.curve), vec(initial_curve(3, 8)));
}

TEST(Descend, CaseTwoCurvatureEnergyDecreases)
{
    OptimizerConfig cfg = coarse();
    cfg.max_iters = 12;
    const auto res = run_case(2, cfg);
    for (std::size_t k = 1; k < res.trace.records.size(); ++k) {
        EXPECT_LT(res.trace.records[k].curve_energy, res.trace.records[k - 1].curve_energy) << "iter " << k;
    }
}

TEST(Descend, RestartAtStationaryPointStopsImmediately)
{
    OptimizerConfig cfg = coarse();
    cfg.stop_tol = 8e-3;
    cfg.max_iters = 500;
    const auto first = run_case(1, cfg);
    ASSERT_TRUE(first.converged);
    ASSERT_GT(first.trace.records.size(), 1u);
    EXPECT_LT(first.trace.records.back().phi_inf, cfg.stop_tol);

    const auto again = descend(first.curve, cfg);
    EXPECT_TRUE(again.converged);
    EXPECT_EQ(again.trace.records.size(), 1u);
    EXPECT_EQ(vec(again.curve), vec(first.curve));
}

TEST(Descend, OversizedStepAbortsWithTraceAndIterate)
{
    OptimizerConfig cfg = coarse();
    cfg.tau = 1e4;
    cfg.max_iters = 5;
    try {
        run_case(2, cfg);
        FAIL() << "expected DescentAborted";
    } catch (const DescentAborted& e) {
        EXPECT_GE(e.trace().records.size(), 1u);
        EXPECT_EQ(e.iterate().n_intervals(), 8);
        ASSERT_TRUE(e.cause());
        EXPECT_THROW(std::rethrow_exception(e.cause()), GeometryError);
    }
}
