#include "bshape/cli.hpp"

#include "bshape/errors.hpp"
#include "bshape/gradcheck.hpp"
#include "bshape/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>

namespace bshape {

namespace fs = std::filesystem;

fs::path resolve_out_dir(const std::string& explicit_dir)
{
    if (!explicit_dir.empty()) {
        return explicit_dir;
    }
    if (const char* env = std::getenv("SHAPEOPT_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "shapeopt_out";
}

namespace {

struct Overrides {
    std::optional<double> re, pr, gr, alpha, tau, h, stop_tol;
    std::optional<int> curve_n, max_iters, snapshot_stride;

    void apply(OptimizerConfig& cfg) const
    {
        if (re) cfg.physical.Re = *re;
        if (pr) cfg.physical.Pr = *pr;
        if (gr) cfg.physical.Gr = *gr;
        if (alpha) cfg.physical.alpha = *alpha;
        if (tau) cfg.tau = *tau;
        if (h) cfg.h = *h;
        if (stop_tol) cfg.stop_tol = *stop_tol;
        if (curve_n) cfg.curve_n = *curve_n;
        if (max_iters) cfg.max_iters = *max_iters;
        if (snapshot_stride) cfg.snapshot_stride = *snapshot_stride;
    }
};

void add_physical(CLI::App* sub, Overrides& o)
{
    sub->add_option("--re", o.re, "Reynolds number");
    sub->add_option("--pr", o.pr, "Prandtl number");
    sub->add_option("--gr", o.gr, "Grashof number");
    sub->add_option("--alpha", o.alpha, "amplitude of the ambient temperature");
}

void add_descent(CLI::App* sub, Overrides& o)
{
    add_physical(sub, o);
    sub->add_option("--h", o.h, "mesh size");
    sub->add_option("--curve-n", o.curve_n, "curve intervals (0: one per bottom mesh edge)");
    sub->add_option("--tau", o.tau, "descent step");
    sub->add_option("--max-iters", o.max_iters, "maximum number of iterations");
    sub->add_option("--stop-tol", o.stop_tol, "stop when max|phi| falls below this");
    sub->add_option("--snapshot-stride", o.snapshot_stride, "iterations between curve snapshots");
}

std::string snapshot_name(int iter)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "curve_%06d.txt", iter);
    return buf;
}

void print_cost(std::ostream& out, const CostBreakdown& c)
{
    out << std::scientific << std::setprecision(6);
    out << "J1            " << c.J1 << '\n';
    out << "curve_energy  " << c.curve_energy << '\n';
    out << "mean_sq       " << c.mean_sq << '\n';
    out << "obstacle      " << c.obstacle << '\n';
    out << "total         " << c.total << '\n';
    out << std::defaultfloat;
}

int run_descent(RunConfig rc, const fs::path& dir, bool deterministic, std::ostream& out)
{
    OptimizerConfig& cfg = rc.optimizer;
    cfg.preset = rc.case_id;
    cfg.validate();
    fs::create_directories(dir);
    rc.out_dir = dir.string();
    {
        std::ofstream f(dir / "config.toml");
        f << serialize_run_config(rc);
        if (!f) {
            throw IoError("cannot write '" + (dir / "config.toml").string() + "'");
        }
    }
    TraceWriter trace(dir / "trace.csv", deterministic);
    out << "case " << rc.case_id << ", h = " << cfg.h << ", N = " << cfg.resolved_curve_n() << ", writing to "
        << dir.string() << '\n';
    auto on_record = [&](const IterationRecord& r, const BoundaryCurve* snapshot) {
        trace.append(r);
        if (snapshot != nullptr) {
            write_curve(dir / snapshot_name(r.iter), *snapshot);
            out << "iter " << r.iter << "  J1 " << std::scientific << std::setprecision(6) << r.J1 << "  total "
                << r.total << "  |phi| " << r.phi_inf << std::defaultfloat << '\n';
        }
    };

    std::optional<DescentResult> result;
    try {
        result = run_case(rc.case_id, cfg, on_record);
    } catch (const DescentAborted& e) {
        write_curve(dir / "aborted_curve.txt", e.iterate());
        out << "descent aborted after " << e.trace().records.size() << " records: " << e.what() << '\n';
        std::rethrow_exception(e.cause());
    }

    write_curve(dir / "final_curve.txt", result->curve);
    const Evaluation fin = evaluate_curve(result->curve, cfg);
    write_vtk(dir / "final_fields.vtk", *fin.state.disc().mesh, solution_fields(fin.state, fin.adjoint));
    write_gradient_csv(dir / "final_gradient.csv", fin.gradient);
    out << (result->converged ? "converged" : "stopped at max_iters") << " after "
        << result->trace.records.size() << " records\n";
    print_cost(out, fin.cost);
    return exit_ok;
}

struct CurveSource {
    std::string file;
    int case_id = 1;

    BoundaryCurve load(int n_intervals) const
    {
        return file.empty() ? initial_curve(case_id, n_intervals) : read_curve(file);
    }
};

void add_curve_source(CLI::App* sub, CurveSource& src)
{
    auto* file = sub->add_option("--curve", src.file, "curve file ('# gamma N=<n>' format)");
    sub->add_option("--case", src.case_id, "preset initial curve (1..5)")->check(CLI::Range(1, 5))->excludes(file);
}

/// Output file names must stay inside the output directory.
fs::path under(const fs::path& dir, const std::string& name)
{
    const fs::path rel(name);
    if (rel.empty() || rel.is_absolute() || rel.has_root_path()) {
        throw ConfigError("output name '" + name + "' must be a relative path");
    }
    for (const auto& part : rel) {
        if (part == "..") {
            throw ConfigError("output name '" + name + "' must not leave the output directory");
        }
    }
    return dir / rel;
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Shape optimization of the bottom of a heated container"};
    app.name("shapeopt");
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    std::string out_dir;
    bool deterministic = false;

    auto* run = app.add_subcommand("run", "full descent from a configuration file");
    std::string config_path;
    run->add_option("--config", config_path, "key = value configuration file")->required();
    run->add_option("--out-dir", out_dir, "output directory");
    run->add_flag("--deterministic", deterministic, "write the wallclock column as 0");

    auto* cas = app.add_subcommand("case", "descent from one of the preset curves");
    int case_id = 1;
    Overrides case_over;
    cas->add_option("id", case_id, "preset 1..5")->required()->check(CLI::Range(1, 5));
    add_descent(cas, case_over);
    cas->add_option("--out-dir", out_dir, "output directory");
    cas->add_flag("--deterministic", deterministic, "write the wallclock column as 0");

    auto* gc = app.add_subcommand("gradcheck", "compare the adjoint gradient with finite differences");
    GradCheckConfig gcfg;
    gcfg.h = 0.0625;
    gcfg.curve_n = 0;
    Overrides gc_over;
    CurveSource gc_src;
    double gc_tol = 0.05;
    gc->add_option("--h", gcfg.h, "mesh size");
    gc->add_option("--curve-n", gcfg.curve_n, "curve intervals (0: one per bottom mesh edge)");
    gc->add_option("--dirs", gcfg.n_dirs, "number of random directions")->check(CLI::PositiveNumber);
    gc->add_option("--step", gcfg.fd_step, "central difference step")->check(CLI::PositiveNumber);
    gc->add_option("--seed", gcfg.seed, "random seed for the directions");
    gc->add_option("--tol", gc_tol, "largest accepted relative error")->check(CLI::PositiveNumber);
    add_physical(gc, gc_over);
    add_curve_source(gc, gc_src);

    auto* so = app.add_subcommand("solve-once", "state and adjoint on one curve, exported to VTK");
    Overrides so_over;
    CurveSource so_src;
    add_physical(so, so_over);
    so->add_option("--h", so_over.h, "mesh size");
    add_curve_source(so, so_src);
    so->add_option("--out-dir", out_dir, "output directory");

    auto* ef = app.add_subcommand("export-fields", "write v, p, T_hat, T, S, w, q at the mesh vertices");
    Overrides ef_over;
    CurveSource ef_src;
    std::string ef_name = "fields.vtk";
    add_physical(ef, ef_over);
    ef->add_option("--h", ef_over.h, "mesh size");
    add_curve_source(ef, ef_src);
    ef->add_option("--out-dir", out_dir, "output directory");
    ef->add_option("--output", ef_name, "file name inside the output directory");

    std::vector<const char*> argv{"shapeopt"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_invalid;
    }

    try {
        if (run->parsed()) {
            RunConfig rc = load_run_config(config_path);
            const fs::path dir = resolve_out_dir(out_dir.empty() ? rc.out_dir : out_dir);
            return run_descent(rc, dir, deterministic, out);
        }
        if (cas->parsed()) {
            RunConfig rc;
            rc.case_id = case_id;
            case_over.apply(rc.optimizer);
            return run_descent(rc, resolve_out_dir(out_dir), deterministic, out);
        }
        if (gc->parsed()) {
            OptimizerConfig probe;
            gc_over.apply(probe);
            gcfg.physical = probe.physical;
            gcfg.physical.validate();
            if (gcfg.curve_n == 0) {
                gcfg.curve_n = cells_for_mesh_size(gcfg.h);
            }
            const BoundaryCurve curve = gc_src.load(gcfg.curve_n);
            gcfg.curve_n = curve.n_intervals();
            const GradCheckResult res = run_gradcheck(curve, gcfg);
            out << "h = " << res.h << ", N = " << res.curve_n << '\n';
            out << std::scientific << std::setprecision(6);
            for (std::size_t k = 0; k < res.directions.size(); ++k) {
                const auto& d = res.directions[k];
                out << "direction " << k << ": adjoint " << d.adjoint << "  finite difference " << d.finite_difference
                    << "  relative error " << d.rel_error << '\n';
            }
            out << "max relative error " << res.max_rel_error() << " (tolerance " << gc_tol << ")\n";
            out << std::defaultfloat;
            return res.max_rel_error() <= gc_tol ? exit_ok : exit_gradcheck;
        }
        if (so->parsed() || ef->parsed()) {
            const bool once = so->parsed();
            OptimizerConfig cfg;
            (once ? so_over : ef_over).apply(cfg);
            cfg.validate();
            const BoundaryCurve curve = (once ? so_src : ef_src).load(cfg.resolved_curve_n());
            const fs::path dir = resolve_out_dir(out_dir);
            const fs::path target = once ? dir / "solve_once.vtk" : under(dir, ef_name);
            const Evaluation e = evaluate_curve(curve, cfg);
            fs::create_directories(target.parent_path());
            write_vtk(target, *e.state.disc().mesh, solution_fields(e.state, e.adjoint));
            out << "wrote " << target.string() << '\n';
            if (once) {
                write_gradient_csv(dir / "gradient.csv", e.gradient);
                write_curve(dir / "curve.txt", curve);
                out << "picard iterations " << e.state.picard_iters << ", final increment " << e.state.final_increment
                    << '\n';
                out << "adjoint residual " << e.adjoint.residual_norm << ", max |div v| " << e.state.max_divergence
                    << '\n';
                print_cost(out, e.cost);
            }
            return exit_ok;
        }
    } catch (const GeometryError& e) {
        err << "geometry error at xi = " << e.xi() << ": " << e.what() << '\n';
        return exit_geometry;
    } catch (const NonConvergenceError& e) {
        err << "not converged: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const DomainError& e) {
        err << "invalid value: " << e.what() << '\n';
        return exit_invalid;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }
    return exit_invalid;
}

} // namespace bshape
