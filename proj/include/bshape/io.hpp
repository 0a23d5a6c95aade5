#pragma once

#include "bshape/optimizer.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bshape {

/// File could not be opened, written or parsed; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// curve text: header "# gamma N=<n>", then one "xi value" pair per line
void write_curve(const std::filesystem::path& path, const BoundaryCurve& curve);
BoundaryCurve read_curve(const std::filesystem::path& path);

inline constexpr const char* trace_header =
    "iter,J1,curve_energy,mean_sq,obstacle,total,phi_inf,picard_iters,wallclock_s";

std::string format_trace_row(const IterationRecord& r);
IterationRecord parse_trace_row(const std::string& line);

/// Append-only trace file; every row is flushed as soon as it is written.
class TraceWriter {
public:
    /// Truncates the file and writes the header. With `zero_wallclock` the
    /// wallclock column is written as 0 so that reruns are byte-identical.
    explicit TraceWriter(const std::filesystem::path& path, bool zero_wallclock = false);
    void append(const IterationRecord& r);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    bool zero_wallclock_;
};

void write_trace(const std::filesystem::path& path, const std::vector<IterationRecord>& records,
                 bool zero_wallclock = false);
std::vector<IterationRecord> read_trace(const std::filesystem::path& path);

struct NamedField {
    std::string name;
    std::vector<double> values; ///< one value per mesh vertex
};

/// Region tag per triangle: 1 touches the bottom with an edge, 2 touches a
/// wall with an edge, 0 otherwise.
std::vector<int> region_tags(const Mesh& mesh);

/// Legacy ASCII VTK unstructured grid: POINTS, CELLS (type 5), CELL_DATA
/// region tags and one POINT_DATA scalar block per field.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const std::vector<NamedField>& fields);

/// Vertex samples of v magnitude, p, T_hat, T, S, w magnitude and q.
std::vector<NamedField> solution_fields(const StateSolution& state, const AdjointSolution& adjoint);

void write_gradient_csv(const std::filesystem::path& path, const GradientSample& g);

/// File form of the optimizer configuration.
struct RunConfig {
    OptimizerConfig optimizer;
    int case_id = 1;
    std::string out_dir; ///< empty: resolved from SHAPEOPT_OUT_DIR at run time
};

/// Flat "key = value" document (comments start with '#'). Unknown or
/// duplicate keys and invalid values raise ConfigError naming the key.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& cfg);

} // namespace bshape
