// plidar: command-line front end for pseudo-LiDAR frame interpolation,
// baselines, evaluation, synthetic data and Chamfer benchmarks.

#include <CLI11.hpp>

#include <array>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "plidar/errors.hpp"
#include "plidar/harness.hpp"
#include "plidar/io.hpp"

namespace {

using namespace plidar;
using namespace plidar::harness;

struct SharedFlags {
    std::string intrinsics;
    std::string out;
    std::string mode = "union";
    double alpha = 0.5;
    std::size_t densify_k = 8;
    double densify_radius = 12.0;
    std::string report = "csv";
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
};

void add_shared(CLI::App& cmd, SharedFlags& f) {
    cmd.add_option("--intrinsics", f.intrinsics, "Intrinsics text file (fu/fv/cu/cv)");
    cmd.add_option("--out", f.out, "Output directory");
    cmd.add_option("--mode", f.mode, "Synthesis mode")->check(CLI::IsMember({"forward", "backward", "union"}));
    cmd.add_option("--alpha", f.alpha, "Interpolation fraction between t-1 and t+1")->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--densify-k", f.densify_k, "Neighbors used by the hole filler")->check(CLI::PositiveNumber);
    cmd.add_option("--densify-radius", f.densify_radius, "Hole filler search radius, pixels")
        ->check(CLI::Range(1.0, 1e6));
    cmd.add_option("--report", f.report, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--seed", f.seed, "Seed for subsampling and synthetic data");
    cmd.add_option("--jobs", f.jobs, "Worker threads (0 = logical cores)");
}

RunConfig to_config(const SharedFlags& f) {
    RunConfig c;
    c.intrinsics_path = f.intrinsics;
    c.output_dir = f.out;
    c.interpolation.mode = parse_synthesis_mode(f.mode);
    c.interpolation.alpha = f.alpha;
    c.interpolation.densify = {f.densify_k, f.densify_radius};
    c.report_format = parse_report_format(f.report);
    c.seed = f.seed;
    c.jobs = f.jobs;
    return c;
}

int report_status(const CommandStatus& status) {
    for (const auto& f : status.failures) {
        std::cerr << "frame " << f.frame_id << ": " << f.error << '\n';
    }
    if (status.report) {
        std::cerr << status.report->frame_count << " frame(s) evaluated, " << status.failures.size()
                  << " failed\n";
    }
    return status.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-LiDAR point cloud interpolation toolkit"};
    app.set_config("--config", "", "INI/TOML file providing default flag values");
    app.require_subcommand(1);

    SharedFlags shared;
    RunConfig run;
    std::size_t sample_points = 0;

    auto* interp = app.add_subcommand("interpolate", "Synthesize intermediate frames from depth maps and scene flow");
    add_shared(*interp, shared);
    interp->add_option("--prev", run.prev_glob, "Depth images at t-1 (glob)")->required();
    interp->add_option("--next", run.next_glob, "Depth images at t+1 (glob)")->required();
    interp->add_option("--flow-fwd", run.flow_fwd_template, "Forward scene flow path template with {id}");
    interp->add_option("--flow-bwd", run.flow_bwd_template, "Backward scene flow path template with {id}");
    interp->add_flag("--zero-flow", run.zero_flow, "Assume a static scene instead of reading flows");
    interp->add_option("--sample-points", sample_points,
                       "Subsample input clouds before flow lookup (0 = off, e.g. 17500)");
    interp->add_flag("--ply", run.write_ply, "Also write ASCII PLY clouds");

    auto* eval = app.add_subcommand("evaluate", "Score predicted depth maps against ground truth");
    add_shared(*eval, shared);
    eval->add_option("--pred", run.pred_glob, "Predicted dense depth images (glob)")->required();
    eval->add_option("--gt", run.gt_glob, "Ground-truth depth images (glob)")->required();
    eval->add_option("--pred-cloud", run.pred_cloud_glob, "Predicted clouds (glob); default back-projects --pred");

    std::string which = "average";
    bool no_densify = false;
    auto* base = app.add_subcommand("baseline", "Run the averaging or optical-flow baseline");
    add_shared(*base, shared);
    base->add_option("--which", which, "Baseline")->check(CLI::IsMember({"average", "optical-flow"}));
    base->add_option("--prev", run.prev_glob, "Depth images at t-1 (glob)")->required();
    base->add_option("--next", run.next_glob, "Depth images at t+1 (glob)")->required();
    base->add_option("--of-fwd", run.optical_fwd_template, "Forward optical flow path template with {id}");
    base->add_option("--of-bwd", run.optical_bwd_template, "Backward optical flow path template with {id}");
    base->add_flag("--zero-flow", run.zero_flow, "Use zero optical flow");
    base->add_option("--gt", run.gt_glob, "Ground-truth depth images (glob) for a report");
    base->add_flag("--no-densify", no_densify, "Write the raw baseline output without hole filling");
    base->add_flag("--ply", run.write_ply, "Also write ASCII PLY clouds");

    SynthConfig synth;
    std::vector<double> rotation{0, 0, 0};
    std::vector<double> translation{0, 0, 0};
    std::string synth_out;
    std::string synth_intrinsics;
    auto* syn = app.add_subcommand("synth", "Generate a synthetic scene with exact flows");
    syn->add_option("--out", synth_out, "Output directory")->required();
    syn->add_option("--frames", synth.frames, "Number of frames")->check(CLI::PositiveNumber);
    syn->add_option("--rotation", rotation, "Axis-angle rotation t-1 -> t+1, radians")->expected(3);
    syn->add_option("--translation", translation, "Translation t-1 -> t+1, meters")->expected(3);
    syn->add_option("--sparsity", synth.spec.sparsity, "Fraction of valid pixels");
    syn->add_option("--width", synth.spec.width, "Image width")->check(CLI::PositiveNumber);
    syn->add_option("--height", synth.spec.height, "Image height")->check(CLI::PositiveNumber);
    syn->add_option("--boxes", synth.spec.boxes, "Number of box obstacles");
    syn->add_option("--seed", synth.spec.seed, "Base seed; frame i uses seed + i");
    syn->add_option("--intrinsics", synth_intrinsics, "Intrinsics file (default: cropped KITTI camera)");

    std::vector<std::size_t> sizes{1000, 10000, 100000};
    std::size_t runs = 5;
    std::size_t brute_max = 50000;
    std::uint64_t bench_seed = 0;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "Time indexed vs brute-force symmetric Chamfer");
    bench->add_option("--sizes", sizes, "Cloud sizes")->delimiter(',');
    bench->add_option("--runs", runs, "Runs per size (median reported, >= 5)");
    bench->add_option("--brute-max", brute_max, "Largest size timed with brute force");
    bench->add_option("--seed", bench_seed, "Seed for the random clouds");
    bench->add_option("--out", bench_out, "CSV output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (interp->parsed() || eval->parsed() || base->parsed()) {
            RunConfig config = to_config(shared);
            config.prev_glob = run.prev_glob;
            config.next_glob = run.next_glob;
            config.flow_fwd_template = run.flow_fwd_template;
            config.flow_bwd_template = run.flow_bwd_template;
            config.optical_fwd_template = run.optical_fwd_template;
            config.optical_bwd_template = run.optical_bwd_template;
            config.zero_flow = run.zero_flow;
            config.gt_glob = run.gt_glob;
            config.pred_glob = run.pred_glob;
            config.pred_cloud_glob = run.pred_cloud_glob;
            config.write_ply = run.write_ply;
            config.interpolation.sample_points = sample_points;
            config.densify_baseline = !no_densify;
            if (config.intrinsics_path.empty()) {
                throw InvalidArgumentError("--intrinsics is required");
            }
            if (config.output_dir.empty() && !eval->parsed()) {
                throw InvalidArgumentError("--out is required");
            }
            if (interp->parsed()) {
                return report_status(cmd_interpolate(config));
            }
            if (eval->parsed()) {
                const CommandStatus status = cmd_evaluate(config);
                if (config.output_dir.empty()) {
                    if (config.report_format == ReportFormat::Csv) {
                        write_report_csv(*status.report, std::cout);
                    } else {
                        write_report_json(*status.report, std::cout);
                    }
                }
                return report_status(status);
            }
            return report_status(cmd_baseline(config, parse_baseline_kind(which)));
        }
        if (syn->parsed()) {
            synth.spec.rotation = {rotation[0], rotation[1], rotation[2]};
            synth.spec.translation = {translation[0], translation[1], translation[2]};
            if (!synth_intrinsics.empty()) {
                synth.spec.intrinsics = io::read_intrinsics(synth_intrinsics);
            }
            synth.output_dir = synth_out;
            cmd_synth(synth);
            return 0;
        }
        if (bench->parsed()) {
            const auto rows = cmd_bench(sizes, runs, brute_max, bench_seed);
            if (bench_out.empty()) {
                write_bench_csv(rows, std::cout);
            } else {
                std::ofstream out(bench_out, std::ios::trunc);
                write_bench_csv(rows, out);
                if (!out) throw IoError("write failed: " + bench_out);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
