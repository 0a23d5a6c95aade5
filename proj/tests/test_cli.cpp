#include "bshape/cli.hpp"
#include "bshape/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

using namespace bshape;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli_run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::set<std::string> tree(const fs::path& root)
{
    std::set<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        out.insert(fs::relative(e.path(), root).string());
    }
    return out;
}

/// Runs each test in a fresh working directory so that stray writes show up.
class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        old_cwd_ = fs::current_path();
        dir_ = fs::temp_directory_path() / (std::string("bshape_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        fs::current_path(dir_);
        unsetenv("SHAPEOPT_OUT_DIR");
    }
    void TearDown() override
    {
        fs::current_path(old_cwd_);
        fs::remove_all(dir_);
        unsetenv("SHAPEOPT_OUT_DIR");
    }

    fs::path old_cwd_;
    fs::path dir_;
};

} // namespace

TEST_F(CliTest, UsageErrors)
{
    EXPECT_EQ(run({}).code, exit_invalid);
    EXPECT_EQ(run({"frobnicate"}).code, exit_invalid);
    EXPECT_EQ(run({"--help"}).code, exit_ok);
    EXPECT_EQ(run({"case", "6"}).code, exit_invalid);
    EXPECT_EQ(run({"case", "1", "--max-iters", "many"}).code, exit_invalid);
    const auto r = run({"case", "1", "--h", "-1", "--out-dir", "o"});
    EXPECT_EQ(r.code, exit_invalid);
    EXPECT_NE(r.err.find("h"), std::string::npos);
    EXPECT_FALSE(fs::exists("o"));
}

TEST_F(CliTest, CasePresetWritesOneTraceRowPerIteration)
{
    const auto r = run({"case", "1", "--h", "0.06", "--max-iters", "50", "--out-dir", "out"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const auto rows = read_trace("out/trace.csv");
    ASSERT_EQ(rows.size(), 50u);
    EXPECT_EQ(rows.front().iter, 0);
    EXPECT_EQ(rows.back().iter, 49);
    EXPECT_TRUE(fs::exists("out/final_curve.txt"));
    EXPECT_TRUE(fs::exists("out/final_fields.vtk"));
    EXPECT_TRUE(fs::exists("out/curve_000000.txt"));
    EXPECT_EQ(read_curve("out/final_curve.txt").n_intervals(), 17);
    const RunConfig snap = load_run_config("out/config.toml");
    EXPECT_EQ(snap.case_id, 1);
    EXPECT_EQ(snap.optimizer.max_iters, 50);
}

TEST_F(CliTest, DeterministicRunsAreByteIdentical)
{
    const std::vector<std::string> base = {"case", "2", "--h", "0.125", "--max-iters", "4", "--deterministic"};
    auto a = base;
    a.insert(a.end(), {"--out-dir", "a"});
    auto b = base;
    b.insert(b.end(), {"--out-dir", "b"});
    ASSERT_EQ(run(a).code, exit_ok);
    ASSERT_EQ(run(b).code, exit_ok);
    EXPECT_EQ(slurp("a/trace.csv"), slurp("b/trace.csv"));
    EXPECT_EQ(slurp("a/final_curve.txt"), slurp("b/final_curve.txt"));
    for (const auto& row : read_trace("a/trace.csv")) {
        EXPECT_EQ(row.wallclock_s, 0.0);
    }
}

TEST_F(CliTest, RunFromConfigWritesOnlyUnderOutDir)
{
    {
        std::ofstream cfg("small.toml");
        cfg << "case = 3\nh = 0.125\nmax_iters = 3\nsnapshot_stride = 2\nout_dir = \"results/c3\"\n";
    }
    const auto before = tree(dir_);
    const auto r = run({"run", "--config", "small.toml"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    for (const auto& p : tree(dir_)) {
        if (before.count(p) == 0) {
            EXPECT_TRUE(p.rfind("results", 0) == 0) << "stray output " << p;
        }
    }
    EXPECT_EQ(read_trace("results/c3/trace.csv").size(), 3u);
    EXPECT_TRUE(fs::exists("results/c3/curve_000002.txt"));

    // the flag overrides the file
    ASSERT_EQ(run({"run", "--config", "small.toml", "--out-dir", "elsewhere"}).code, exit_ok);
    EXPECT_TRUE(fs::exists("elsewhere/trace.csv"));
}

TEST_F(CliTest, EnvironmentSuppliesDefaultOutDir)
{
    setenv("SHAPEOPT_OUT_DIR", (dir_ / "from_env").c_str(), 1);
    EXPECT_EQ(resolve_out_dir(""), dir_ / "from_env");
    EXPECT_EQ(resolve_out_dir("given"), fs::path("given"));
    ASSERT_EQ(run({"case", "1", "--h", "0.25", "--max-iters", "1"}).code, exit_ok);
    EXPECT_TRUE(fs::exists(dir_ / "from_env" / "trace.csv"));
    unsetenv("SHAPEOPT_OUT_DIR");
    EXPECT_EQ(resolve_out_dir(""), fs::path("shapeopt_out"));
}

TEST_F(CliTest, ConfigProblemsExitOneNamingPathOrKey)
{
    auto r = run({"run", "--config", "absent.toml"});
    EXPECT_EQ(r.code, exit_invalid);
    EXPECT_NE(r.err.find("absent.toml"), std::string::npos);

    std::ofstream("bad.toml") << "tau = 1e-3\nwobble = 2\n";
    r = run({"run", "--config", "bad.toml"});
    EXPECT_EQ(r.code, exit_invalid);
    EXPECT_NE(r.err.find("wobble"), std::string::npos);

    std::ofstream("neg.toml") << "tau = -1\n";
    r = run({"run", "--config", "neg.toml"});
    EXPECT_EQ(r.code, exit_invalid);
    EXPECT_NE(r.err.find("tau"), std::string::npos);
}

TEST_F(CliTest, GradcheckPassesAndFailsOnTolerance)
{
    auto r = run({"gradcheck", "--h", "0.0625", "--dirs", "3"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    int found = 0;
    while (std::getline(lines, line)) {
        const auto at = line.find("relative error ");
        if (line.rfind("direction", 0) == 0 && at != std::string::npos) {
            EXPECT_LE(std::stod(line.substr(at + 15)), 0.05) << line;
            ++found;
        }
    }
    EXPECT_EQ(found, 3);
    r = run({"gradcheck", "--h", "0.25", "--dirs", "1", "--tol", "1e-9"});
    EXPECT_EQ(r.code, exit_gradcheck);
}

TEST_F(CliTest, SolveOnceAndExportFields)
{
    auto r = run({"solve-once", "--case", "2", "--h", "0.125", "--out-dir", "s"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    EXPECT_TRUE(fs::exists("s/solve_once.vtk"));
    EXPECT_TRUE(fs::exists("s/gradient.csv"));
    EXPECT_TRUE(fs::exists("s/curve.txt"));
    EXPECT_NE(r.out.find("J1"), std::string::npos);

    r = run({"export-fields", "--curve", "s/curve.txt", "--h", "0.125", "--out-dir", "e", "--output", "sub/f.vtk"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const std::string vtk = slurp("e/sub/f.vtk");
    for (const char* name : {"v_magnitude", "p", "T_hat", "T", "S", "w_magnitude", "q"}) {
        EXPECT_NE(vtk.find(std::string("SCALARS ") + name + " double"), std::string::npos) << name;
    }
    // identical curve and mesh: the fields agree with solve-once byte for byte
    EXPECT_EQ(vtk, slurp("s/solve_once.vtk"));

    EXPECT_EQ(run({"export-fields", "--out-dir", "e", "--output", "../escape.vtk"}).code, exit_invalid);
    EXPECT_FALSE(fs::exists("escape.vtk"));
    EXPECT_EQ(run({"export-fields", "--curve", "missing.txt"}).code, exit_invalid);
}

TEST_F(CliTest, SolverAndGeometryFailuresHaveDistinctCodes)
{
    auto r = run({"solve-once", "--gr", "1e5", "--h", "0.125", "--out-dir", "x"});
    EXPECT_EQ(r.code, exit_nonconvergence);
    r = run({"case", "2", "--h", "0.125", "--tau", "1e4", "--out-dir", "g"});
    EXPECT_EQ(r.code, exit_geometry);
    EXPECT_TRUE(fs::exists("g/aborted_curve.txt"));
    EXPECT_EQ(read_trace("g/trace.csv").size(), 1u);
}
