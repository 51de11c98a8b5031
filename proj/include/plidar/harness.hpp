#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plidar/interpolation.hpp"
#include "plidar/metrics.hpp"
#include "plidar/synthetic.hpp"

namespace plidar::harness {

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(const std::string& name);

/// Options shared by the batch commands. Depth-map and cloud inputs are
/// glob patterns matched in sorted order; per-frame flow inputs are path
/// templates in which "{id}" is replaced by the frame id (the stem of the
/// matching --prev file).
struct RunConfig {
    std::string prev_glob;
    std::string next_glob;
    std::string flow_fwd_template;
    std::string flow_bwd_template;
    std::string optical_fwd_template;
    std::string optical_bwd_template;
    bool zero_flow = false;

    std::string gt_glob;
    std::string pred_glob;
    std::string pred_cloud_glob;

    std::filesystem::path intrinsics_path;
    std::filesystem::path output_dir;

    InterpolationOptions interpolation;
    bool densify_baseline = true;
    bool write_ply = false;
    ReportFormat report_format = ReportFormat::Csv;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;  // 0 = hardware concurrency

    void validate() const;
};

/// One frame as named on disk.
struct FrameInputs {
    std::string id;
    std::filesystem::path prev;
    std::filesystem::path next;
};

/// Files matching a glob pattern (`*` and `?` in the last path component),
/// sorted by name. A pattern without wildcards names at most one file.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

/// Replaces every "{id}" in `templ` with `id`.
std::filesystem::path resolve_template(const std::string& templ, const std::string& id);

/// Pairs --prev and --next matches in order; throws when the counts differ.
std::vector<FrameInputs> collect_frames(const RunConfig& config);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions stay
/// inside fn; callers record per-item failures themselves.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct FrameRow {
    std::string frame_id;
    MetricsReport metrics;
    double wall_ms = 0.0;
};

struct FrameFailure {
    std::string frame_id;
    std::string error;
};

struct MetricSummary {
    double rmse = 0.0;
    double mae = 0.0;
    double irmse = 0.0;
    double imae = 0.0;
    double cd_mean = 0.0;
    double cd_sum = 0.0;
    double n_valid = 0.0;
    double wall_ms = 0.0;
};

struct AggregateReport {
    std::vector<FrameRow> frames;
    std::vector<FrameFailure> failures;
    MetricSummary mean;
    MetricSummary stddev;  // population standard deviation
    std::size_t frame_count = 0;
    StageTimes stage_ms;
};

/// Unweighted mean and population std of each column over `frames`.
AggregateReport aggregate(std::vector<FrameRow> frames);

/// Column set of CSV reports, in order.
const std::vector<std::string>& report_columns();

void write_report_csv(const AggregateReport& report, std::ostream& out);
void write_report_json(const AggregateReport& report, std::ostream& out);
void write_report(const AggregateReport& report, ReportFormat format, const std::filesystem::path& path);

/// Result of a batch command: exit status plus per-frame errors.
struct CommandStatus {
    int exit_code = 0;
    std::vector<FrameFailure> failures;
    std::optional<AggregateReport> report;
};

/// Writes <out>/dense/<id>.png, <out>/cloud/<id>.bin and, with write_ply,
/// <out>/ply/<id>.ply for every frame.
CommandStatus cmd_interpolate(const RunConfig& config);

/// Depth metrics of --pred vs --gt dense maps and Chamfer distance of the
/// back-projected clouds (or --pred-cloud files). Writes
/// <out>/report.{csv,json}.
CommandStatus cmd_evaluate(const RunConfig& config);

enum class BaselineKind { Average, OpticalFlow };
BaselineKind parse_baseline_kind(const std::string& name);

/// Runs a baseline on every frame, writes its outputs like cmd_interpolate,
/// and, when --gt is set, a report with cmd_evaluate's schema.
CommandStatus cmd_baseline(const RunConfig& config, BaselineKind kind);

struct SynthConfig {
    SyntheticSpec spec;
    std::size_t frames = 1;
    std::filesystem::path output_dir;
};

/// Writes frames generated with seeds spec.seed + i into
/// prev/ mid/ next/ gt/ gt_cloud/ flow_fwd/ flow_bwd/ of_fwd/ of_bwd/ oracle/
/// subdirectories, plus intrinsics.txt and scene.json.
void cmd_synth(const SynthConfig& config);

struct BenchRow {
    std::size_t n = 0;
    double build_ms = 0.0;
    double indexed_ms = 0.0;           // symmetric chamfer including both builds
    std::optional<double> brute_ms;    // empty above the brute-force limit
};

/// Median-of-`runs` timings of symmetric Chamfer between two random clouds
/// of each size.
std::vector<BenchRow> cmd_bench(const std::vector<std::size_t>& sizes, std::size_t runs, std::size_t brute_max,
                                std::uint64_t seed);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace plidar::harness
