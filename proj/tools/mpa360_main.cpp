#include <CLI11.hpp>
#include <iostream>

#include "mpa/pipeline.hpp"
#include "mpa/synthesize.hpp"

namespace {

mpa::FrameGeometry parse_geometry(const std::string& text) {
    const size_t x = text.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("geometry must be WIDTHxHEIGHT");
    return mpa::FrameGeometry(std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1)));
}

struct CommonArgs {
    std::vector<std::string> inputs;
    std::vector<std::string> modes{"tmc", "mpa-t", "mpa-ic6p", "mpa-ic4p"};
    std::vector<int> block_sizes{16, 32};
    std::vector<double> qp_list{0.5, 1.0, 2.0, 4.0, 8.0};
    int pairs = 32;
    uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";
    std::string downscale;
    double search_range = 96.0;
    double subpel = 0.125;
    int max_iterations = 50;
    double step_gain = 2.0;
    bool dump_predictions = false;

    mpa::ExperimentConfig to_config() const {
        mpa::ExperimentConfig cfg;
        for (const auto& in : inputs) cfg.inputs.emplace_back(in);
        cfg.modes.clear();
        for (const auto& m : modes) cfg.modes.push_back(mpa::mode_from_name(m));
        cfg.block_sizes = block_sizes;
        cfg.qp_list = qp_list;
        cfg.pairs = pairs;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.out_dir = out_dir;
        cfg.search.search_range_px = search_range;
        cfg.search.subpel_precision = subpel;
        cfg.iclk.max_iterations = max_iterations;
        cfg.iclk.step_gain = step_gain;
        cfg.dump_predictions = dump_predictions;
        if (!downscale.empty()) cfg.downscale_to = parse_geometry(downscale);
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_qp) {
    cmd->add_option("--input", args.inputs, "raw sequence file(s); sidecar <file>.meta required")
        ->required();
    cmd->add_option("--mode", args.modes, "estimation modes")
        ->check(CLI::IsMember({"tmc", "mpa-t", "mpa-ic6p", "mpa-ic4p"}));
    cmd->add_option("--bs", args.block_sizes, "block sizes")->check(CLI::IsMember({16, 32}));
    if (with_qp) cmd->add_option("--qp-list", args.qp_list, "quantizer multipliers");
    cmd->add_option("--pairs", args.pairs, "frame pairs per sequence");
    cmd->add_option("--seed", args.seed, "seed for any randomized stage");
    cmd->add_option("--threads", args.threads, "worker threads (never changes results)");
    cmd->add_option("--out-dir", args.out_dir, "output directory");
    cmd->add_option("--downscale", args.downscale, "downscale input to WIDTHxHEIGHT, e.g. 768x384");
    cmd->add_option("--search-range", args.search_range, "diamond search range in pixels");
    cmd->add_option("--subpel", args.subpel, "subpel precision (negative power of two)");
    cmd->add_option("--max-iterations", args.max_iterations, "refinement iteration cap");
    cmd->add_option("--step-gain", args.step_gain, "refinement update gain");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion plane adaptive inter prediction toolkit for 360-degree video"};
    app.require_subcommand(1);

    CommonArgs est_args;
    CLI::App* estimate = app.add_subcommand("estimate", "motion estimation + compensation metrics");
    add_common(estimate, est_args, false);
    estimate->add_flag("--dump-pred", est_args.dump_predictions, "write predicted frames as PGM");

    CommonArgs rd_args;
    CLI::App* rd = app.add_subcommand("rd", "rate-distortion sweep and BD-rate report");
    add_common(rd, rd_args, true);

    // synth
    std::string synth_kind = "pan";
    std::string synth_out = "synthetic.y";
    std::string synth_geom = "768x384";
    int synth_frames = 33;
    uint64_t synth_seed = 1;
    int synth_depth = 8;
    double pan_px = 1.0;
    double rot_deg = 0.5;
    std::vector<double> rot_axis{0.25, 1.0, 0.15};
    double zoom = 0.02;
    std::vector<double> affine_step;
    double noise_sigma = 0.0;
    std::string synth_plane = "front-back";
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic ground-truth sequence");
    synth->add_option("--kind", synth_kind, "pan | rotate-sphere | zoom-on-plane | affine-on-plane")
        ->check(CLI::IsMember({"pan", "rotate-sphere", "zoom-on-plane", "affine-on-plane"}));
    synth->add_option("--out", synth_out, "output raw luma path")->required();
    synth->add_option("--geometry", synth_geom, "WIDTHxHEIGHT (width = 2*height)");
    synth->add_option("--frames", synth_frames, "frame count");
    synth->add_option("--seed", synth_seed, "texture seed");
    synth->add_option("--depth", synth_depth, "bit depth (8 or 10)")->check(CLI::IsMember({8, 10}));
    synth->add_option("--pan-px", pan_px, "pan: pixels per frame");
    synth->add_option("--rot-deg", rot_deg, "rotate-sphere: degrees per frame");
    synth->add_option("--rot-axis", rot_axis, "rotate-sphere: axis (3 numbers)")->expected(3);
    synth->add_option("--zoom", zoom, "zoom-on-plane: scale step per frame");
    synth->add_option("--affine", affine_step, "affine-on-plane: a b c d e f per frame")->expected(6);
    synth->add_option("--noise-sigma", noise_sigma, "additive noise sigma per frame");
    synth->add_option("--plane", synth_plane, "motion plane for the plane kinds")
        ->check(CLI::IsMember({"front-back", "left-right", "top-bottom"}));

    // metrics
    std::string metrics_a, metrics_b, anchor_csv, test_csv;
    int metrics_frame = -1;
    CLI::App* metrics = app.add_subcommand("metrics", "standalone PSNR / WS-PSNR / BD-rate");
    metrics->add_option("--a", metrics_a, "first sequence (raw + sidecar)");
    metrics->add_option("--b", metrics_b, "second sequence");
    metrics->add_option("--frame", metrics_frame, "compare only this frame index");
    metrics->add_option("--anchor-csv", anchor_csv, "BD: anchor rd csv");
    metrics->add_option("--test-csv", test_csv, "BD: test rd csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*estimate) {
            const mpa::ExperimentConfig cfg = est_args.to_config();
            const mpa::EstimateOutputs out = mpa::run_estimate(cfg);
            std::cout << mpa::format_result_table(out.rows);
            std::cout << "wrote " << (cfg.out_dir / "results.csv").string() << "\n";
        } else if (*rd) {
            const mpa::ExperimentConfig cfg = rd_args.to_config();
            const mpa::RdOutputs out = mpa::run_rd(cfg);
            for (const auto& row : out.bd_rows) {
                std::cout << row.sequence << " bs" << row.block_size << ' '
                          << mpa::mode_name(row.mode) << ": " << row.bd_rate_pct << " %\n";
            }
            std::cout << "wrote " << (cfg.out_dir / "rd.csv").string() << "\n";
        } else if (*synth) {
            mpa::SynthConfig cfg;
            cfg.kind = mpa::synth_kind_from_name(synth_kind);
            cfg.geom = parse_geometry(synth_geom);
            cfg.frames = synth_frames;
            cfg.seed = synth_seed;
            cfg.bit_depth = synth_depth;
            cfg.pan_px_per_frame = pan_px;
            cfg.rotation_deg_per_frame = rot_deg;
            cfg.rotation_axis = Eigen::Vector3d(rot_axis[0], rot_axis[1], rot_axis[2]);
            cfg.zoom_per_frame = zoom;
            cfg.noise_sigma = noise_sigma;
            if (synth_plane == "left-right") cfg.plane = mpa::PlaneId::LeftRight;
            if (synth_plane == "top-bottom") cfg.plane = mpa::PlaneId::TopBottom;
            if (!affine_step.empty()) {
                cfg.affine_per_frame = mpa::AffineParams(mpa::AffineModel::SixParam);
                for (int i = 0; i < 6; ++i) cfg.affine_per_frame.values[i] = affine_step[static_cast<size_t>(i)];
            }
            const mpa::SequenceSource src = mpa::synthesize_sequence(cfg, synth_out);
            std::cout << "wrote " << src.path.string() << " (" << src.frame_count << " frames)\n";
        } else if (*metrics) {
            if (!anchor_csv.empty() || !test_csv.empty()) {
                if (anchor_csv.empty() || test_csv.empty()) {
                    throw std::invalid_argument("BD needs both --anchor-csv and --test-csv");
                }
                const auto anchors = mpa::read_rd_csv(anchor_csv);
                const auto tests = mpa::read_rd_csv(test_csv);
                for (const auto& a : anchors) {
                    for (const auto& t : tests) {
                        std::cout << "bd-rate " << t.label << " vs " << a.label << ": "
                                  << mpa::bd_rate(a, t) << " %\n";
                    }
                }
            } else {
                if (metrics_a.empty() || metrics_b.empty()) {
                    throw std::invalid_argument("frame metrics need --a and --b");
                }
                const mpa::SequenceSource sa = mpa::open_sequence(metrics_a);
                const mpa::SequenceSource sb = mpa::open_sequence(metrics_b);
                const int count = std::min(sa.frame_count, sb.frame_count);
                double psnr_acc = 0.0, ws_acc = 0.0;
                int n = 0;
                for (int i = 0; i < count; ++i) {
                    if (metrics_frame >= 0 && i != metrics_frame) continue;
                    const mpa::Frame fa = mpa::read_luma(sa, i);
                    const mpa::Frame fb = mpa::read_luma(sb, i);
                    const double p = mpa::psnr(fa, fb);
                    const double w = mpa::ws_psnr(fa, fb);
                    std::cout << "frame " << i << ": psnr " << p << " dB, ws-psnr " << w << " dB\n";
                    psnr_acc += p;
                    ws_acc += w;
                    ++n;
                }
                if (n > 1) {
                    std::cout << "average: psnr " << psnr_acc / n << " dB, ws-psnr " << ws_acc / n
                              << " dB\n";
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
