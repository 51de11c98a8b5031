#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

#include "plidar/errors.hpp"
#include "plidar/harness.hpp"
#include "plidar/io.hpp"

using namespace plidar;
using namespace plidar::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void touch(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << "x";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

class HarnessTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("plidar_harness_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Small synthetic data set: 2 frames at quarter resolution.
    fs::path synth(std::size_t frames = 2, Point3 translation = {0.2, 0.0, 1.0}) {
        SynthConfig config;
        config.spec.width = 304;
        config.spec.height = 64;
        const CameraIntrinsics full = default_synthetic_intrinsics();
        config.spec.intrinsics = CameraIntrinsics(full.fu() / 4, full.fv() / 4, full.cu() / 4, full.cv() / 4);
        config.spec.sparsity = 0.1;
        config.spec.translation = translation;
        config.spec.seed = 3;
        config.frames = frames;
        config.output_dir = dir_ / "data";
        cmd_synth(config);
        return config.output_dir;
    }

    RunConfig interpolate_config(const fs::path& data, const std::string& out) {
        RunConfig c;
        c.prev_glob = (data / "prev" / "*.png").string();
        c.next_glob = (data / "next" / "*.png").string();
        c.flow_fwd_template = (data / "flow_fwd" / "{id}.plsf").string();
        c.flow_bwd_template = (data / "flow_bwd" / "{id}.plsf").string();
        c.intrinsics_path = data / "intrinsics.txt";
        c.output_dir = dir_ / out;
        c.jobs = 2;
        return c;
    }

    fs::path dir_;
};

FrameRow row(const std::string& id, double cd) {
    FrameRow r;
    r.frame_id = id;
    r.metrics.cd_mean = cd;
    r.metrics.cd_sum = 2 * cd;
    r.metrics.rmse = 10 * cd;
    return r;
}

}  // namespace

TEST_F(HarnessTest, GlobMatchesSortedFilesInLastComponent) {
    touch(dir_ / "a" / "b.png");
    touch(dir_ / "a" / "a.png");
    touch(dir_ / "a" / "c.txt");
    touch(dir_ / "a" / "ab.png");
    const auto all = expand_glob((dir_ / "a" / "*.png").string());
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(all[0].filename(), "a.png");
    EXPECT_EQ(all[1].filename(), "ab.png");
    EXPECT_EQ(all[2].filename(), "b.png");
    EXPECT_EQ(expand_glob((dir_ / "a" / "?.png").string()).size(), 2u);
    EXPECT_EQ(expand_glob((dir_ / "a" / "c.txt").string()).size(), 1u);
    EXPECT_TRUE(expand_glob((dir_ / "a" / "zzz.txt").string()).empty());
    EXPECT_TRUE(expand_glob((dir_ / "missing" / "*.png").string()).empty());
}

TEST(Harness, TemplatesReplaceEveryId) {
    EXPECT_EQ(resolve_template("flows/{id}/{id}.plsf", "000007"), fs::path("flows/000007/000007.plsf"));
    EXPECT_EQ(resolve_template("fixed.plsf", "1"), fs::path("fixed.plsf"));
}

TEST(Harness, ParallelForVisitsEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
    parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Harness, AggregateMeanAndPopulationStd) {
    const AggregateReport r = aggregate({row("a", 1.0), row("b", 3.0)});
    EXPECT_EQ(r.frame_count, 2u);
    EXPECT_EQ(r.mean.cd_mean, 2.0);
    EXPECT_EQ(r.mean.cd_sum, 4.0);
    EXPECT_EQ(r.mean.rmse, 20.0);
    EXPECT_EQ(r.stddev.cd_mean, 1.0);
    EXPECT_EQ(aggregate({}).frame_count, 0u);
}

TEST(Harness, CsvSchema) {
    std::ostringstream out;
    write_report_csv(aggregate({row("a", 1.0), row("b", 3.0)}), out);
    const auto rows = parse_csv(out.str());
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], report_columns());
    EXPECT_EQ(rows[0][0], "frame_id");
    EXPECT_EQ(rows[1][0], "a");
    EXPECT_EQ(rows[3][0], "mean");
    EXPECT_EQ(rows[4][0], "std");
    for (const auto& r : rows) EXPECT_EQ(r.size(), report_columns().size());
    const auto cd_col = std::find(rows[0].begin(), rows[0].end(), "cd_mean_m2") - rows[0].begin();
    EXPECT_EQ(std::stod(rows[3][cd_col]), 2.0);
}

TEST(Harness, JsonReportCarriesFramesAndAggregates) {
    std::ostringstream out;
    write_report_json(aggregate({row("a", 1.0), row("b", 3.0)}), out);
    const std::string s = out.str();
    EXPECT_NE(s.find("\"frames\""), std::string::npos);
    EXPECT_NE(s.find("\"mean\""), std::string::npos);
    EXPECT_NE(s.find("\"cd_mean_m2\""), std::string::npos);
    EXPECT_THROW(parse_report_format("xml"), InvalidArgumentError);
}

TEST_F(HarnessTest, SynthWritesAllArtifactsDeterministically) {
    const fs::path data = synth();
    for (const char* sub : {"prev", "mid", "next", "gt"}) {
        EXPECT_EQ(expand_glob((data / sub / "*.png").string()).size(), 2u) << sub;
    }
    EXPECT_EQ(expand_glob((data / "flow_fwd" / "*.plsf").string()).size(), 2u);
    EXPECT_EQ(expand_glob((data / "of_bwd" / "*.plof").string()).size(), 2u);
    EXPECT_TRUE(fs::exists(data / "intrinsics.txt"));
    EXPECT_TRUE(fs::exists(data / "scene.json"));
    const std::string first = slurp(data / "prev" / "000000.png");
    const std::string flow = slurp(data / "flow_fwd" / "000001.plsf");
    fs::remove_all(data);
    synth();
    EXPECT_EQ(slurp(data / "prev" / "000000.png"), first);
    EXPECT_EQ(slurp(data / "flow_fwd" / "000001.plsf"), flow);
}

TEST_F(HarnessTest, SynthZeroMotionFramesAreIdentical) {
    const fs::path data = synth(1, {0, 0, 0});
    EXPECT_EQ(slurp(data / "prev" / "000000.png"), slurp(data / "next" / "000000.png"));
    EXPECT_EQ(slurp(data / "prev" / "000000.png"), slurp(data / "mid" / "000000.png"));
}

TEST_F(HarnessTest, InterpolateWritesOutputsAndIsReproducible) {
    const fs::path data = synth();
    RunConfig c = interpolate_config(data, "out1");
    c.write_ply = true;
    const CommandStatus s = cmd_interpolate(c);
    EXPECT_EQ(s.exit_code, 0);
    EXPECT_TRUE(fs::exists(c.output_dir / "dense" / "000000.png"));
    EXPECT_TRUE(fs::exists(c.output_dir / "cloud" / "000000.bin"));
    EXPECT_TRUE(fs::exists(c.output_dir / "ply" / "000001.ply"));

    RunConfig again = interpolate_config(data, "out2");
    again.jobs = 1;
    EXPECT_EQ(cmd_interpolate(again).exit_code, 0);
    for (const char* f : {"dense/000000.png", "dense/000001.png", "cloud/000000.bin", "cloud/000001.bin"}) {
        EXPECT_EQ(slurp(c.output_dir / f), slurp(again.output_dir / f)) << f;
    }
}

TEST_F(HarnessTest, MissingFlowFileFailsOnlyThatFrame) {
    const fs::path data = synth();
    fs::remove(data / "flow_bwd" / "000000.plsf");
    const RunConfig c = interpolate_config(data, "out");
    const CommandStatus s = cmd_interpolate(c);
    EXPECT_NE(s.exit_code, 0);
    ASSERT_EQ(s.failures.size(), 1u);
    EXPECT_EQ(s.failures[0].frame_id, "000000");
    EXPECT_FALSE(fs::exists(c.output_dir / "dense" / "000000.png"));
    EXPECT_TRUE(fs::exists(c.output_dir / "dense" / "000001.png"));
}

TEST_F(HarnessTest, MismatchedFrameCountsAreRejected) {
    const fs::path data = synth();
    fs::remove(data / "next" / "000001.png");
    EXPECT_THROW(cmd_interpolate(interpolate_config(data, "out")), InvalidArgumentError);

    RunConfig eval;
    eval.pred_glob = (data / "prev" / "*.png").string();
    eval.gt_glob = (data / "next" / "*.png").string();
    eval.intrinsics_path = data / "intrinsics.txt";
    EXPECT_THROW(cmd_evaluate(eval), InvalidArgumentError);
}

TEST_F(HarnessTest, EvaluateIdentityIsZero) {
    const fs::path data = synth();
    RunConfig c;
    c.pred_glob = (data / "gt" / "*.png").string();
    c.gt_glob = c.pred_glob;
    c.intrinsics_path = data / "intrinsics.txt";
    c.output_dir = dir_ / "eval";
    const CommandStatus s = cmd_evaluate(c);
    ASSERT_TRUE(s.report);
    EXPECT_EQ(s.exit_code, 0);
    EXPECT_EQ(s.report->frame_count, 2u);
    EXPECT_EQ(s.report->mean.rmse, 0.0);
    EXPECT_EQ(s.report->mean.mae, 0.0);
    EXPECT_EQ(s.report->mean.irmse, 0.0);
    EXPECT_EQ(s.report->mean.imae, 0.0);
    EXPECT_EQ(s.report->mean.cd_mean, 0.0);
    EXPECT_EQ(s.report->mean.cd_sum, 0.0);
    EXPECT_TRUE(fs::exists(c.output_dir / "report.csv"));
}

TEST_F(HarnessTest, EvaluateAfterInterpolateScoresFrames) {
    const fs::path data = synth();
    const RunConfig ic = interpolate_config(data, "interp");
    ASSERT_EQ(cmd_interpolate(ic).exit_code, 0);
    RunConfig c;
    c.pred_glob = (ic.output_dir / "dense" / "*.png").string();
    c.pred_cloud_glob = (ic.output_dir / "cloud" / "*.bin").string();
    c.gt_glob = (data / "gt" / "*.png").string();
    c.intrinsics_path = data / "intrinsics.txt";
    c.output_dir = dir_ / "eval";
    c.report_format = ReportFormat::Json;
    const CommandStatus s = cmd_evaluate(c);
    ASSERT_TRUE(s.report);
    EXPECT_GT(s.report->mean.rmse, 0.0);
    EXPECT_TRUE(std::isfinite(s.report->mean.cd_mean));
    EXPECT_TRUE(fs::exists(c.output_dir / "report.json"));
}

TEST_F(HarnessTest, AverageBaselineOnConstantMaps) {
    const CameraIntrinsics k(100, 100, 8, 4);
    io::write_intrinsics(k, dir_ / "k.txt");
    fs::create_directories(dir_ / "prev");
    fs::create_directories(dir_ / "next");
    io::write_depth_png(DepthMap(16, 8, std::vector<double>(128, 4.0)), dir_ / "prev" / "f.png");
    io::write_depth_png(DepthMap(16, 8, std::vector<double>(128, 6.0)), dir_ / "next" / "f.png");
    RunConfig c;
    c.prev_glob = (dir_ / "prev" / "*.png").string();
    c.next_glob = (dir_ / "next" / "*.png").string();
    c.gt_glob = c.next_glob;
    c.intrinsics_path = dir_ / "k.txt";
    c.output_dir = dir_ / "out";
    const CommandStatus s = cmd_baseline(c, BaselineKind::Average);
    EXPECT_EQ(s.exit_code, 0);
    EXPECT_EQ(io::read_depth_png(dir_ / "out" / "dense" / "f.png"), DepthMap(16, 8, std::vector<double>(128, 5.0)));
    ASSERT_TRUE(s.report);
    EXPECT_DOUBLE_EQ(s.report->mean.rmse, 1000.0);
    // Same schema as evaluate.
    const auto rows = parse_csv(slurp(dir_ / "out" / "report.csv"));
    EXPECT_EQ(rows[0], report_columns());
}

TEST_F(HarnessTest, OpticalFlowBaselineWithZeroFlowIsUnion) {
    const CameraIntrinsics k(100, 100, 8, 4);
    io::write_intrinsics(k, dir_ / "k.txt");
    fs::create_directories(dir_ / "prev");
    fs::create_directories(dir_ / "next");
    const DepthMap a(4, 1, {2.0, 0.0, 5.0, 0.0});
    const DepthMap b(4, 1, {3.0, 4.0, 1.0, 0.0});
    io::write_depth_png(a, dir_ / "prev" / "f.png");
    io::write_depth_png(b, dir_ / "next" / "f.png");
    RunConfig c;
    c.prev_glob = (dir_ / "prev" / "*.png").string();
    c.next_glob = (dir_ / "next" / "*.png").string();
    c.zero_flow = true;
    c.densify_baseline = false;
    c.intrinsics_path = dir_ / "k.txt";
    c.output_dir = dir_ / "out";
    EXPECT_EQ(cmd_baseline(c, BaselineKind::OpticalFlow).exit_code, 0);
    EXPECT_EQ(io::read_depth_png(dir_ / "out" / "dense" / "f.png"), DepthMap(4, 1, {2.0, 4.0, 1.0, 0.0}));
    EXPECT_THROW(parse_baseline_kind("median"), InvalidArgumentError);
}

TEST(Harness, BenchRowsParseAsCsv) {
    const auto rows = cmd_bench({1000, 3000}, 5, 1000, 1);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].brute_ms.has_value());
    EXPECT_FALSE(rows[1].brute_ms.has_value());
    EXPECT_LE(rows[0].indexed_ms, *rows[0].brute_ms);
    std::ostringstream out;
    write_bench_csv(rows, out);
    const auto csv = parse_csv(out.str());
    ASSERT_EQ(csv.size(), 3u);
    EXPECT_EQ(csv[0], (std::vector<std::string>{"n", "build_ms", "indexed_ms", "brute_ms", "speedup"}));
    EXPECT_EQ(csv[1][0], "1000");
    EXPECT_GT(std::stod(csv[1][4]), 0.0);
    EXPECT_THROW(cmd_bench({1000}, 3, 0, 1), InvalidArgumentError);
}

TEST(Harness, LargeBenchCompletes) {
    const auto rows = cmd_bench({100000}, 5, 0, 2);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_GT(rows[0].indexed_ms, 0.0);
}

// End-to-end through the command-line binary.
class CliTest : public HarnessTest {
protected:
    int run(const std::string& args) {
        const std::string cmd = std::string(PLIDAR_CLI_PATH) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                                " 2>" + (dir_ / "stderr.txt").string();
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }
};

TEST_F(CliTest, SynthInterpolateEvaluate) {
    const fs::path data = dir_ / "data";
    io::write_intrinsics(CameraIntrinsics(180.384425, 180.384425, 149.139825, 13.4635), dir_ / "k.txt");
    ASSERT_EQ(run("synth --out " + data.string() + " --frames 2 --width 304 --height 64 --translation 0.2 0 1 " +
                  "--sparsity 0.1 --intrinsics " + (dir_ / "k.txt").string()),
              0);
    const std::string k = (data / "intrinsics.txt").string();
    ASSERT_EQ(run("interpolate --prev '" + (data / "prev/*.png").string() + "' --next '" +
                  (data / "next/*.png").string() + "' --flow-fwd '" + (data / "flow_fwd/{id}.plsf").string() +
                  "' --flow-bwd '" + (data / "flow_bwd/{id}.plsf").string() + "' --intrinsics " + k + " --out " +
                  (dir_ / "interp").string() + " --jobs 2"),
              0);
    EXPECT_TRUE(fs::exists(dir_ / "interp" / "dense" / "000001.png"));
    ASSERT_EQ(run("evaluate --pred '" + (dir_ / "interp/dense/*.png").string() + "' --gt '" +
                  (data / "gt/*.png").string() + "' --intrinsics " + k),
              0);
    const auto csv = parse_csv(slurp(dir_ / "stdout.txt"));
    ASSERT_EQ(csv.size(), 5u);
    EXPECT_EQ(csv[0], report_columns());
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
    const fs::path data = dir_ / "data";
    io::write_intrinsics(CameraIntrinsics(180.384425, 180.384425, 149.139825, 13.4635), dir_ / "k.txt");
    ASSERT_EQ(run("synth --out " + data.string() + " --width 304 --height 64 --intrinsics " +
                  (dir_ / "k.txt").string()),
              0);
    std::ofstream(dir_ / "run.ini") << "[baseline]\nwhich=average\nintrinsics=" << (data / "intrinsics.txt").string()
                                    << "\nout=" << (dir_ / "avg").string() << "\n";
    ASSERT_EQ(run("--config " + (dir_ / "run.ini").string() + " baseline --prev '" + (data / "prev/*.png").string() +
                  "' --next '" + (data / "next/*.png").string() + "'"),
              0)
        << slurp(dir_ / "stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "avg" / "dense" / "000000.png"));
}

TEST_F(CliTest, ErrorsMapToExitCodes) {
    EXPECT_NE(run(""), 0);
    EXPECT_EQ(run("interpolate --prev 'none/*.png' --next 'none/*.png' --zero-flow --out x"), 2);
    EXPECT_EQ(run("bench --sizes 500 --runs 5 --brute-max 500 --out " + (dir_ / "b.csv").string()), 0);
    EXPECT_EQ(parse_csv(slurp(dir_ / "b.csv")).size(), 2u);
}
