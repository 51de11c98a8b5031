#include "plidar/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "plidar/errors.hpp"
#include "plidar/io.hpp"
#include "plidar/spatial_index.hpp"

namespace plidar::harness {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool wildcard_match(std::string_view pattern, std::string_view name) {
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t star = std::string_view::npos;
    std::size_t resume = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            resume = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++resume;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string frame_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06zu", i);
    return buf;
}

std::size_t effective_jobs(std::size_t jobs) {
    if (jobs > 0) return jobs;
    return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

MetricsReport evaluate_frame(const DepthMap& pred, const PointCloud& pred_cloud, const DepthMap& gt,
                             const CameraIntrinsics& k) {
    MetricsReport r = depth_metrics(pred, gt);
    const PointCloud gt_cloud = back_project(gt, k);
    r.n_pred = pred_cloud.size();
    r.n_gt = gt_cloud.size();
    const ChamferResult cd = chamfer(pred_cloud, gt_cloud);
    r.cd_sum = cd.sum;
    r.cd_mean = cd.mean;
    return r;
}

void write_frame_outputs(const RunConfig& config, const std::string& id, const DepthMap& dense,
                         const PointCloud& cloud) {
    io::write_depth_png(dense, config.output_dir / "dense" / (id + ".png"));
    io::write_cloud_bin(cloud, config.output_dir / "cloud" / (id + ".bin"));
    if (config.write_ply) {
        io::write_ply(cloud, config.output_dir / "ply" / (id + ".ply"));
    }
}

void prepare_output_dirs(const RunConfig& config) {
    fs::create_directories(config.output_dir / "dense");
    fs::create_directories(config.output_dir / "cloud");
    if (config.write_ply) {
        fs::create_directories(config.output_dir / "ply");
    }
}

std::vector<fs::path> require_matches(const std::string& pattern, const char* flag) {
    auto files = expand_glob(pattern);
    if (files.empty()) {
        throw InvalidArgumentError(std::string(flag) + " '" + pattern + "' matches no files");
    }
    return files;
}

/// Collects per-frame outcomes from worker threads in input order.
struct FrameOutcomes {
    explicit FrameOutcomes(std::size_t n) : rows(n), errors(n), stage_ms(n) {}

    std::vector<std::optional<FrameRow>> rows;
    std::vector<std::optional<std::string>> errors;
    std::vector<StageTimes> stage_ms;

    CommandStatus finish(const std::vector<FrameInputs>& frames, bool with_report) {
        CommandStatus status;
        std::vector<FrameRow> ok;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            if (errors[i]) {
                status.failures.push_back({frames[i].id, *errors[i]});
            } else if (rows[i]) {
                ok.push_back(*rows[i]);
            }
        }
        status.exit_code = status.failures.empty() ? 0 : 1;
        if (with_report) {
            AggregateReport report = aggregate(std::move(ok));
            report.failures = status.failures;
            for (const auto& st : stage_ms) {
                for (const auto& [stage, ms] : st) report.stage_ms[stage] += ms;
            }
            status.report = std::move(report);
        }
        return status;
    }
};

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw InvalidArgumentError("unknown report format '" + name + "' (expected csv or json)");
}

BaselineKind parse_baseline_kind(const std::string& name) {
    if (name == "average") return BaselineKind::Average;
    if (name == "optical-flow") return BaselineKind::OpticalFlow;
    throw InvalidArgumentError("unknown baseline '" + name + "' (expected average or optical-flow)");
}

void RunConfig::validate() const {
    interpolation.validate();
    if (!intrinsics_path.empty() && !fs::exists(intrinsics_path)) {
        throw InvalidArgumentError("intrinsics file " + intrinsics_path.string() + " does not exist");
    }
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
    const fs::path p(pattern);
    const std::string leaf = p.filename().string();
    if (leaf.find_first_of("*?") == std::string::npos) {
        if (fs::is_regular_file(p)) return {p};
        return {};
    }
    if (p.parent_path().string().find_first_of("*?") != std::string::npos) {
        throw InvalidArgumentError("wildcards are only supported in the last path component: " + pattern);
    }
    const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && wildcard_match(leaf, entry.path().filename().string())) {
            out.push_back(p.parent_path().empty() ? entry.path().filename() : entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path resolve_template(const std::string& templ, const std::string& id) {
    std::string out = templ;
    constexpr std::string_view kKey = "{id}";
    for (std::size_t pos = out.find(kKey); pos != std::string::npos; pos = out.find(kKey, pos + id.size())) {
        out.replace(pos, kKey.size(), id);
    }
    return out;
}

std::vector<FrameInputs> collect_frames(const RunConfig& config) {
    const auto prev = require_matches(config.prev_glob, "--prev");
    const auto next = require_matches(config.next_glob, "--next");
    if (prev.size() != next.size()) {
        throw InvalidArgumentError("--prev matches " + std::to_string(prev.size()) + " files but --next matches " +
                                   std::to_string(next.size()));
    }
    std::vector<FrameInputs> frames;
    frames.reserve(prev.size());
    for (std::size_t i = 0; i < prev.size(); ++i) {
        frames.push_back({prev[i].stem().string(), prev[i], next[i]});
    }
    return frames;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(effective_jobs(jobs), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

AggregateReport aggregate(std::vector<FrameRow> frames) {
    AggregateReport report;
    report.frames = std::move(frames);
    report.frame_count = report.frames.size();
    if (report.frames.empty()) {
        return report;
    }
    const auto column = [&](auto get) {
        double sum = 0.0;
        for (const auto& f : report.frames) sum += get(f);
        const double mean = sum / static_cast<double>(report.frames.size());
        double var = 0.0;
        for (const auto& f : report.frames) {
            const double d = get(f) - mean;
            var += d * d;
        }
        return std::pair{mean, std::sqrt(var / static_cast<double>(report.frames.size()))};
    };
    std::tie(report.mean.rmse, report.stddev.rmse) = column([](const FrameRow& f) { return f.metrics.rmse; });
    std::tie(report.mean.mae, report.stddev.mae) = column([](const FrameRow& f) { return f.metrics.mae; });
    std::tie(report.mean.irmse, report.stddev.irmse) = column([](const FrameRow& f) { return f.metrics.irmse; });
    std::tie(report.mean.imae, report.stddev.imae) = column([](const FrameRow& f) { return f.metrics.imae; });
    std::tie(report.mean.cd_mean, report.stddev.cd_mean) = column([](const FrameRow& f) { return f.metrics.cd_mean; });
    std::tie(report.mean.cd_sum, report.stddev.cd_sum) = column([](const FrameRow& f) { return f.metrics.cd_sum; });
    std::tie(report.mean.n_valid, report.stddev.n_valid) =
        column([](const FrameRow& f) { return static_cast<double>(f.metrics.n_valid); });
    std::tie(report.mean.wall_ms, report.stddev.wall_ms) = column([](const FrameRow& f) { return f.wall_ms; });
    return report;
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> columns = {"frame_id",    "rmse_mm",    "mae_mm",
                                                     "irmse_per_km", "imae_per_km", "cd_mean_m2",
                                                     "cd_sum_m2",   "n_valid",    "wall_ms"};
    return columns;
}

void write_report_csv(const AggregateReport& report, std::ostream& out) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
    for (const auto& f : report.frames) {
        const auto& m = f.metrics;
        out << f.frame_id << ',' << format_double(m.rmse) << ',' << format_double(m.mae) << ','
            << format_double(m.irmse) << ',' << format_double(m.imae) << ',' << format_double(m.cd_mean) << ','
            << format_double(m.cd_sum) << ',' << m.n_valid << ',' << format_double(f.wall_ms) << '\n';
    }
    const auto summary_row = [&](const char* label, const MetricSummary& s) {
        out << label << ',' << format_double(s.rmse) << ',' << format_double(s.mae) << ',' << format_double(s.irmse)
            << ',' << format_double(s.imae) << ',' << format_double(s.cd_mean) << ',' << format_double(s.cd_sum)
            << ',' << format_double(s.n_valid) << ',' << format_double(s.wall_ms) << '\n';
    };
    if (!report.frames.empty()) {
        summary_row("mean", report.mean);
        summary_row("std", report.stddev);
    }
}

void write_report_json(const AggregateReport& report, std::ostream& out) {
    using nlohmann::json;
    const auto summary = [](const MetricSummary& s) {
        return json{{"rmse_mm", s.rmse},       {"mae_mm", s.mae},         {"irmse_per_km", s.irmse},
                    {"imae_per_km", s.imae},   {"cd_mean_m2", s.cd_mean}, {"cd_sum_m2", s.cd_sum},
                    {"n_valid", s.n_valid},    {"wall_ms", s.wall_ms}};
    };
    json frames = json::array();
    for (const auto& f : report.frames) {
        const auto& m = f.metrics;
        frames.push_back({{"frame_id", f.frame_id},   {"rmse_mm", m.rmse},         {"mae_mm", m.mae},
                          {"irmse_per_km", m.irmse},  {"imae_per_km", m.imae},     {"cd_mean_m2", m.cd_mean},
                          {"cd_sum_m2", m.cd_sum},    {"n_valid", m.n_valid},      {"n_inverse", m.n_inverse},
                          {"n_pred", m.n_pred},       {"n_gt", m.n_gt},            {"wall_ms", f.wall_ms}});
    }
    json failures = json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"frame_id", f.frame_id}, {"error", f.error}});
    }
    json doc{{"columns", report_columns()},
             {"frames", frames},
             {"aggregate", {{"mean", summary(report.mean)}, {"std", summary(report.stddev)}}},
             {"frame_count", report.frame_count},
             {"failures", failures},
             {"stage_ms", report.stage_ms}};
    out << doc.dump(2) << '\n';
}

void write_report(const AggregateReport& report, ReportFormat format, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    if (format == ReportFormat::Csv) {
        write_report_csv(report, out);
    } else {
        write_report_json(report, out);
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

CommandStatus cmd_interpolate(const RunConfig& config) {
    config.validate();
    const auto frames = collect_frames(config);
    const CameraIntrinsics k = io::read_intrinsics(config.intrinsics_path);
    if (!config.zero_flow && config.flow_fwd_template.empty() && config.flow_bwd_template.empty()) {
        throw InvalidArgumentError("interpolate needs --flow-fwd/--flow-bwd templates or --zero-flow");
    }
    prepare_output_dirs(config);

    FrameOutcomes outcomes(frames.size());
    parallel_for(frames.size(), config.jobs, [&](std::size_t i) {
        const auto& f = frames[i];
        try {
            const DepthMap d_prev = io::read_depth_png(f.prev);
            const DepthMap d_next = io::read_depth_png(f.next);
            FrameResult result;
            InterpolationOptions opts = config.interpolation;
            opts.seed = config.seed;
            if (config.zero_flow) {
                result = interpolate_frame(d_prev, d_next, ZeroFlowProvider{}, k, opts);
            } else {
                const io::FileFlowProvider provider(
                    config.flow_fwd_template.empty() ? fs::path() : resolve_template(config.flow_fwd_template, f.id),
                    config.flow_bwd_template.empty() ? fs::path() : resolve_template(config.flow_bwd_template, f.id));
                result = interpolate_frame(d_prev, d_next, provider, k, opts);
            }
            write_frame_outputs(config, f.id, result.dense, result.cloud);
            outcomes.stage_ms[i] = result.stage_ms;
        } catch (const std::exception& e) {
            outcomes.errors[i] = e.what();
        }
    });
    return outcomes.finish(frames, false);
}

CommandStatus cmd_evaluate(const RunConfig& config) {
    config.validate();
    const auto preds = require_matches(config.pred_glob, "--pred");
    const auto gts = require_matches(config.gt_glob, "--gt");
    if (preds.size() != gts.size()) {
        throw InvalidArgumentError("--pred matches " + std::to_string(preds.size()) + " files but --gt matches " +
                                   std::to_string(gts.size()));
    }
    std::vector<fs::path> pred_clouds;
    if (!config.pred_cloud_glob.empty()) {
        pred_clouds = require_matches(config.pred_cloud_glob, "--pred-cloud");
        if (pred_clouds.size() != preds.size()) {
            throw InvalidArgumentError("--pred-cloud matches " + std::to_string(pred_clouds.size()) +
                                       " files but --pred matches " + std::to_string(preds.size()));
        }
    }
    const CameraIntrinsics k = io::read_intrinsics(config.intrinsics_path);

    std::vector<FrameInputs> frames;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        frames.push_back({preds[i].stem().string(), preds[i], gts[i]});
    }
    FrameOutcomes outcomes(frames.size());
    parallel_for(frames.size(), config.jobs, [&](std::size_t i) {
        const auto start = Clock::now();
        try {
            const DepthMap pred = io::read_depth_png(frames[i].prev);
            const DepthMap gt = io::read_depth_png(frames[i].next);
            const PointCloud pred_cloud = pred_clouds.empty() ? back_project(pred, k) : io::read_cloud_bin(pred_clouds[i]);
            outcomes.stage_ms[i]["load"] = ms_since(start);
            const auto t_metrics = Clock::now();
            const MetricsReport m = evaluate_frame(pred, pred_cloud, gt, k);
            outcomes.stage_ms[i]["metrics"] = ms_since(t_metrics);
            outcomes.rows[i] = FrameRow{frames[i].id, m, ms_since(start)};
        } catch (const std::exception& e) {
            outcomes.errors[i] = e.what();
        }
    });
    CommandStatus status = outcomes.finish(frames, true);
    if (!config.output_dir.empty()) {
        fs::create_directories(config.output_dir);
        write_report(*status.report, config.report_format,
                     config.output_dir / (config.report_format == ReportFormat::Csv ? "report.csv" : "report.json"));
    }
    return status;
}

CommandStatus cmd_baseline(const RunConfig& config, BaselineKind kind) {
    config.validate();
    const auto frames = collect_frames(config);
    const CameraIntrinsics k = io::read_intrinsics(config.intrinsics_path);
    std::vector<fs::path> gts;
    if (!config.gt_glob.empty()) {
        gts = require_matches(config.gt_glob, "--gt");
        if (gts.size() != frames.size()) {
            throw InvalidArgumentError("--gt matches " + std::to_string(gts.size()) + " files for " +
                                       std::to_string(frames.size()) + " frames");
        }
    }
    if (kind == BaselineKind::OpticalFlow && !config.zero_flow &&
        (config.optical_fwd_template.empty() && config.optical_bwd_template.empty())) {
        throw InvalidArgumentError("optical-flow baseline needs --of-fwd/--of-bwd templates or --zero-flow");
    }
    prepare_output_dirs(config);

    const auto& opts = config.interpolation;
    FrameOutcomes outcomes(frames.size());
    parallel_for(frames.size(), config.jobs, [&](std::size_t i) {
        const auto& f = frames[i];
        const auto start = Clock::now();
        try {
            const DepthMap d_prev = io::read_depth_png(f.prev);
            const DepthMap d_next = io::read_depth_png(f.next);
            DepthMap mid;
            if (kind == BaselineKind::Average) {
                mid = average_baseline(d_prev, d_next);
            } else {
                const auto load = [&](const std::string& templ, const DepthMap& like) {
                    if (config.zero_flow || templ.empty()) return OpticalFlow(like.width(), like.height());
                    return io::read_optical_flow(resolve_template(templ, f.id));
                };
                const bool need_fwd = opts.mode != SynthesisMode::Backward;
                const bool need_bwd = opts.mode != SynthesisMode::Forward;
                if ((need_fwd && !config.zero_flow && config.optical_fwd_template.empty()) ||
                    (need_bwd && !config.zero_flow && config.optical_bwd_template.empty())) {
                    throw InvalidArgumentError("mode " + to_string(opts.mode) + " needs both optical flow directions");
                }
                mid = optical_flow_midpoint(d_prev, d_next, need_fwd ? load(config.optical_fwd_template, d_prev)
                                                                     : OpticalFlow(d_prev.width(), d_prev.height()),
                                            need_bwd ? load(config.optical_bwd_template, d_next)
                                                     : OpticalFlow(d_next.width(), d_next.height()),
                                            opts.mode, opts.alpha);
            }
            outcomes.stage_ms[i]["baseline"] = ms_since(start);
            const auto t_dense = Clock::now();
            const DepthMap dense = config.densify_baseline ? densify(mid, opts.densify) : mid;
            const PointCloud cloud = back_project(dense, k);
            outcomes.stage_ms[i]["densify"] = ms_since(t_dense);
            write_frame_outputs(config, f.id, dense, cloud);
            if (!gts.empty()) {
                const auto t_metrics = Clock::now();
                const DepthMap gt = io::read_depth_png(gts[i]);
                const MetricsReport m = evaluate_frame(dense, cloud, gt, k);
                outcomes.stage_ms[i]["metrics"] = ms_since(t_metrics);
                outcomes.rows[i] = FrameRow{f.id, m, ms_since(start)};
            }
        } catch (const std::exception& e) {
            outcomes.errors[i] = e.what();
        }
    });
    CommandStatus status = outcomes.finish(frames, !gts.empty());
    if (status.report) {
        write_report(*status.report, config.report_format,
                     config.output_dir / (config.report_format == ReportFormat::Csv ? "report.csv" : "report.json"));
    }
    return status;
}

void cmd_synth(const SynthConfig& config) {
    config.spec.validate();
    if (config.frames == 0) {
        throw InvalidArgumentError("synth needs at least one frame");
    }
    const fs::path& out = config.output_dir;
    for (const char* sub : {"prev", "mid", "next", "gt", "gt_cloud", "flow_fwd", "flow_bwd", "of_fwd", "of_bwd",
                            "oracle"}) {
        fs::create_directories(out / sub);
    }
    io::write_intrinsics(config.spec.intrinsics, out / "intrinsics.txt");

    nlohmann::json seeds = nlohmann::json::array();
    for (std::size_t i = 0; i < config.frames; ++i) {
        SyntheticSpec spec = config.spec;
        spec.seed = config.spec.seed + i;
        spec.quantize_depth = true;
        const SyntheticScene scene = generate_synthetic(spec);
        const std::string id = frame_name(i);
        io::write_depth_png(scene.sparse_prev, out / "prev" / (id + ".png"));
        io::write_depth_png(scene.sparse_mid, out / "mid" / (id + ".png"));
        io::write_depth_png(scene.sparse_next, out / "next" / (id + ".png"));
        io::write_depth_png(scene.dense_mid, out / "gt" / (id + ".png"));
        io::write_cloud_bin(scene.cloud_mid, out / "gt_cloud" / (id + ".bin"));
        io::write_scene_flow(scene.flow_fwd, out / "flow_fwd" / (id + ".plsf"));
        io::write_scene_flow(scene.flow_bwd, out / "flow_bwd" / (id + ".plsf"));
        io::write_optical_flow(scene.optical_fwd, out / "of_fwd" / (id + ".plof"));
        io::write_optical_flow(scene.optical_bwd, out / "of_bwd" / (id + ".plof"));
        io::write_cloud_bin(scene.oracle_mid, out / "oracle" / (id + ".bin"));
        seeds.push_back({{"frame_id", id}, {"seed", spec.seed}});
    }

    const auto& s = config.spec;
    const nlohmann::json doc{
        {"rotation", {s.rotation.x, s.rotation.y, s.rotation.z}},
        {"translation", {s.translation.x, s.translation.y, s.translation.z}},
        {"sparsity", s.sparsity},
        {"width", s.width},
        {"height", s.height},
        {"boxes", s.boxes},
        {"intrinsics", {{"fu", s.intrinsics.fu()}, {"fv", s.intrinsics.fv()}, {"cu", s.intrinsics.cu()},
                        {"cv", s.intrinsics.cv()}}},
        {"frames", seeds}};
    std::ofstream meta(out / "scene.json", std::ios::trunc);
    meta << doc.dump(2) << '\n';
    if (!meta) {
        throw IoError("write failed: " + (out / "scene.json").string());
    }
}

std::vector<BenchRow> cmd_bench(const std::vector<std::size_t>& sizes, std::size_t runs, std::size_t brute_max,
                                std::uint64_t seed) {
    if (runs < 5) {
        throw InvalidArgumentError("bench needs at least 5 runs per size");
    }
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        if (n == 0) {
            throw InvalidArgumentError("bench sizes must be positive");
        }
        std::mt19937_64 rng(seed + n);
        std::uniform_real_distribution<double> coord(-50.0, 50.0);
        const auto random_cloud = [&] {
            PointCloud pc;
            pc.points.resize(n);
            for (auto& p : pc.points) p = {coord(rng), coord(rng), coord(rng)};
            return pc;
        };
        const PointCloud a = random_cloud();
        const PointCloud b = random_cloud();

        std::vector<double> build;
        std::vector<double> indexed;
        std::vector<double> brute;
        double sink = 0.0;
        for (std::size_t r = 0; r < runs; ++r) {
            auto start = Clock::now();
            {
                const KdTree ta(a);
                const KdTree tb(b);
                sink += static_cast<double>(ta.depth() + tb.depth());
            }
            build.push_back(ms_since(start));

            start = Clock::now();
            sink += chamfer(a, b).sum;
            indexed.push_back(ms_since(start));

            if (n <= brute_max) {
                start = Clock::now();
                sink += chamfer_directional_brute(a, b) + chamfer_directional_brute(b, a);
                brute.push_back(ms_since(start));
            }
        }
        BenchRow row{n, median(build), median(indexed), std::nullopt};
        if (!brute.empty()) row.brute_ms = median(brute);
        if (!std::isfinite(sink)) {
            throw Error("bench produced a non-finite result");
        }
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
    out << "n,build_ms,indexed_ms,brute_ms,speedup\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_double(r.build_ms) << ',' << format_double(r.indexed_ms) << ',';
        if (r.brute_ms) {
            out << format_double(*r.brute_ms) << ',' << format_double(*r.brute_ms / r.indexed_ms);
        } else {
            out << ',';
        }
        out << '\n';
    }
}

}  // namespace plidar::harness
