#include "bshape/optimizer.hpp"

#include "bshape/errors.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bshape {

namespace {

void require(bool ok, const char* field, const char* rule)
{
    if (!ok) {
        std::ostringstream msg;
        msg << "optimizer config: " << field << " " << rule;
        throw DomainError(msg.str());
    }
}

double inf_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

int OptimizerConfig::resolved_curve_n() const
{
    return curve_n > 0 ? curve_n : cells_for_mesh_size(h);
}

void OptimizerConfig::validate() const
{
    physical.validate();
    require(tau > 0.0 && std::isfinite(tau), "tau", "must be positive");
    require(h > 0.0 && h <= 0.5, "h", "must lie in (0, 0.5]");
    require(curve_n >= 0 && curve_n != 1, "curve_n", "must be 0 (auto) or at least 2");
    require(max_iters >= 0, "max_iters", "must be non-negative");
    require(stop_tol > 0.0, "stop_tol", "must be positive");
    require(snapshot_stride > 0, "snapshot_stride", "must be positive");
    require(penalties.lambda1 >= 0.0, "lambda1", "must be non-negative");
    require(penalties.lambda2 >= 0.0, "lambda2", "must be non-negative");
    require(penalties.lambda3 >= 0.0, "lambda3", "must be non-negative");
    require(penalties.nu >= 0.0 && penalties.nu < 1.0, "nu", "must lie in [0, 1)");
    require(!preset || (*preset >= 1 && *preset <= 5), "case", "must be 1..5");
}

Evaluation evaluate_curve(const BoundaryCurve& curve, const OptimizerConfig& cfg)
{
    const Discretization disc = make_discretization(build_mesh(curve, cfg.h));
    Evaluation e{solve_state(disc, cfg.physical, cfg.picard), {}, {}, {}};
    e.adjoint = solve_adjoint(e.state);
    e.cost = evaluate_cost(e.state, curve, cfg.penalties);
    e.gradient = compute_gradient(e.state, e.adjoint, curve, cfg.penalties);
    return e;
}

DescentResult descend(const BoundaryCurve& gamma0, const OptimizerConfig& cfg, const RecordCallback& on_record)
{
    cfg.validate();
    if (gamma0.n_intervals() != cfg.resolved_curve_n()) {
        std::ostringstream msg;
        msg << "descend: initial curve has " << gamma0.n_intervals() << " intervals, config expects "
            << cfg.resolved_curve_n();
        throw DomainError(msg.str());
    }
    const auto start = std::chrono::steady_clock::now();
    DescentResult out{gamma0, {}, false};
    out.trace.config = cfg;
    std::vector<double> values(gamma0.values().begin(), gamma0.values().end());

    for (int n = 0;; ++n) {
        Evaluation e;
        try {
            e = evaluate_curve(out.curve, cfg);
        } catch (const std::exception& ex) {
            std::ostringstream msg;
            msg << "descent aborted at iteration " << n << ": " << ex.what();
            throw DescentAborted(msg.str(), out.trace, out.curve, std::current_exception());
        }
        IterationRecord r;
        r.iter = n;
        r.J1 = e.cost.J1;
        r.curve_energy = e.cost.curve_energy;
        r.mean_sq = e.cost.mean_sq;
        r.obstacle = e.cost.obstacle;
        r.total = e.cost.total;
        r.phi_inf = inf_norm(e.gradient.phi);
        r.picard_iters = e.state.picard_iters;
        r.div_v = e.state.max_divergence;
        r.div_w = e.adjoint.max_divergence;
        r.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.trace.records.push_back(r);
        const bool snap = n % cfg.snapshot_stride == 0;
        if (snap) {
            out.trace.snapshots.emplace_back(n, out.curve);
        }
        if (on_record) {
            on_record(r, snap ? &out.curve : nullptr);
        }

        if (r.phi_inf < cfg.stop_tol) {
            out.converged = true;
            break;
        }
        if (n >= cfg.max_iters) {
            break;
        }
        for (std::size_t i = 1; i + 1 < values.size(); ++i) {
            values[i] -= cfg.tau * e.gradient.phi[i];
        }
        try {
            out.curve = BoundaryCurve(values);
        } catch (const std::exception& ex) {
            std::ostringstream msg;
            msg << "descent aborted after iteration " << n << ": " << ex.what();
            throw DescentAborted(msg.str(), out.trace, out.curve, std::current_exception());
        }
        if (n + 1 >= cfg.max_iters) {
            break;
        }
    }
    return out;
}

BoundaryCurve initial_curve(int case_id, int n_intervals)
{
    using std::numbers::pi;
    switch (case_id) {
    case 1:
        return BoundaryCurve::flat(n_intervals);
    case 2:
        return BoundaryCurve::sample([](double x) { return -0.1 * std::sin(3 * pi * x); }, n_intervals);
    case 3:
        return BoundaryCurve::sample([](double x) { return -0.1 * std::sin(5 * pi * x); }, n_intervals);
    case 4:
        return BoundaryCurve::sample([](double x) { return -0.01 * std::sin(7 * pi * x); }, n_intervals);
    case 5:
        return BoundaryCurve::sample([](double x) { return -0.1 * std::sin(5 * pi * x) * std::exp(-3 * x); },
                                     n_intervals);
    default: {
        std::ostringstream msg;
        msg << "unknown case id " << case_id << " (expected 1..5)";
        throw DomainError(msg.str());
    }
    }
}

DescentResult run_case(int case_id, OptimizerConfig cfg, const RecordCallback& on_record)
{
    const BoundaryCurve gamma0 = initial_curve(case_id, cfg.resolved_curve_n());
    cfg.preset = case_id;
    return descend(gamma0, cfg, on_record);
}

} // namespace bshape
