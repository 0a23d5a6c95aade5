#pragma once

#include "bshape/shape_gradient.hpp"

#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bshape {

struct OptimizerConfig {
    PhysicalParams physical;
    Penalties penalties;
    double tau = 1e-3;
    double h = 0.03;
    int curve_n = 0; ///< 0 selects ceil(1/h), so curve nodes are bottom mesh vertices
    int max_iters = 1000;
    double stop_tol = 1e-7; ///< on ||phi||_inf
    int snapshot_stride = 100;
    PicardOptions picard;
    std::optional<int> preset;

    int resolved_curve_n() const;
    /// Throws DomainError naming the offending field.
    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    double J1 = 0.0;
    double curve_energy = 0.0;
    double mean_sq = 0.0;
    double obstacle = 0.0;
    double total = 0.0;
    double phi_inf = 0.0;
    int picard_iters = 0;
    double wallclock_s = 0.0;
    // diagnostics, not part of the trace file
    double div_v = 0.0; ///< max over Picard iterations of ||B_div v||_inf
    double div_w = 0.0; ///< ||B_div w||_inf of the adjoint velocity
};

struct Trace {
    OptimizerConfig config;
    std::vector<IterationRecord> records;
    std::vector<std::pair<int, BoundaryCurve>> snapshots;
};

struct DescentResult {
    BoundaryCurve curve;
    Trace trace;
    bool converged = false; ///< stopped on stop_tol rather than max_iters
};

/// Called after each record; `snapshot` is non-null on snapshot iterations.
using RecordCallback = std::function<void(const IterationRecord&, const BoundaryCurve* snapshot)>;

/// Raised when a state/adjoint solve or the mesh generator fails during the
/// descent. Carries the trace so far and the iterate that failed; the
/// original exception is available through cause().
class DescentAborted : public std::runtime_error {
public:
    DescentAborted(const std::string& what, Trace trace, BoundaryCurve iterate, std::exception_ptr cause)
        : std::runtime_error(what), trace_(std::move(trace)), iterate_(std::move(iterate)), cause_(std::move(cause))
    {
    }
    const Trace& trace() const noexcept { return trace_; }
    const BoundaryCurve& iterate() const noexcept { return iterate_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    Trace trace_;
    BoundaryCurve iterate_;
    std::exception_ptr cause_;
};

/// Everything computed at one curve: state, adjoint, cost and gradient.
struct Evaluation {
    StateSolution state;
    AdjointSolution adjoint;
    CostBreakdown cost;
    GradientSample gradient;
};

Evaluation evaluate_curve(const BoundaryCurve& curve, const OptimizerConfig& cfg);

/// Preconditioned gradient descent gamma <- gamma - tau phi. Record n holds
/// the cost of gamma_n; the loop stops when ||phi_n||_inf < stop_tol (no
/// update is applied then) or after max_iters updates.
DescentResult descend(const BoundaryCurve& gamma0, const OptimizerConfig& cfg, const RecordCallback& on_record = {});

/// Initial curves of the five presets sampled on N intervals.
BoundaryCurve initial_curve(int case_id, int n_intervals);

/// Samples the preset curve on cfg's grid and runs descend; cfg.preset is
/// set to case_id.
DescentResult run_case(int case_id, OptimizerConfig cfg, const RecordCallback& on_record = {});

} // namespace bshape
