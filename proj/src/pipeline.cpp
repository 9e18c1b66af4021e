#include "mpa/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace mpa {

namespace {

using Clock = std::chrono::steady_clock;

struct PairMetrics {
    int tmpl_index = 0;
    int ref_index = 0;
    double psnr_db = 0.0;
    double ws_psnr_db = 0.0;
};

std::string sequence_label(const std::filesystem::path& path) {
    return path.stem().string();
}

std::string format_db(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

Frame load_frame(const SequenceSource& src, int index, const std::optional<FrameGeometry>& target) {
    Frame frame = read_luma(src, index);
    if (target && !(frame.geometry() == *target)) {
        frame = downscale(frame, *target);
    }
    return frame;
}

double mean(const std::vector<double>& values) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

}  // namespace

EstimateOutputs run_estimate(const ExperimentConfig& cfg) {
    if (cfg.inputs.empty()) throw std::invalid_argument("no input sequences");
    if (cfg.modes.empty() || cfg.block_sizes.empty()) {
        throw std::invalid_argument("modes and block sizes must be nonempty");
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::filesystem::create_directories(cfg.out_dir / "motion");

    std::ofstream pair_csv(cfg.out_dir / "results_pairs.csv");
    pair_csv << "sequence,bs,mode,template,reference,psnr_db,wspsnr_db\n";

    EstimateOutputs outputs;
    std::map<std::pair<std::string, int>, double> anchor_seconds;

    for (const auto& input : cfg.inputs) {
        const SequenceSource src = open_sequence(input);
        const std::string label = sequence_label(input);
        const FramePairPlan plan = plan_pairs(src.frame_count, cfg.pairs);

        // Frames are loaded once per sequence and shared across modes.
        std::map<int, Frame> frames;
        for (const auto& [t, r] : plan.pairs) {
            if (!frames.count(t)) frames.emplace(t, load_frame(src, t, cfg.downscale_to));
            if (!frames.count(r)) frames.emplace(r, load_frame(src, r, cfg.downscale_to));
        }

        for (const int bs : cfg.block_sizes) {
            for (const EstimationMode mode : cfg.modes) {
                std::vector<double> psnrs, wspsnrs;
                double seconds = 0.0;
                for (const auto& [t, r] : plan.pairs) {
                    const Frame& tmpl = frames.at(t);
                    const Frame& ref = frames.at(r);

                    const auto start = Clock::now();
                    const FrameEstimate est =
                        estimate_frame(tmpl, ref, mode, bs, cfg.search, cfg.iclk, cfg.threads);
                    const Frame predicted = compensate_frame(ref, est.field, cfg.threads);
                    seconds += std::chrono::duration<double>(Clock::now() - start).count();

                    const double p = psnr(tmpl, predicted);
                    const double w = ws_psnr(tmpl, predicted);
                    psnrs.push_back(p);
                    wspsnrs.push_back(w);
                    pair_csv << label << ',' << bs << ',' << mode_name(mode) << ',' << t << ',' << r
                             << ',' << format_db(p) << ',' << format_db(w) << '\n';

                    if (cfg.save_fields) {
                        std::ostringstream name;
                        name << label << "_bs" << bs << '_' << mode_name(mode) << '_' << t << ".mpaf";
                        save_field(est.field, cfg.out_dir / "motion" / name.str());
                    }
                    if (cfg.dump_predictions) {
                        std::ostringstream name;
                        name << label << "_bs" << bs << '_' << mode_name(mode) << '_' << t << ".pgm";
                        write_pgm(predicted, cfg.out_dir / name.str());
                    }
                }

                ResultRow row;
                row.sequence = label;
                row.block_size = bs;
                row.mode = mode;
                row.psnr_db = mean(psnrs);
                row.ws_psnr_db = mean(wspsnrs);
                row.seconds = seconds;
                if (mode == EstimationMode::MpaTranslational) {
                    anchor_seconds[{label, bs}] = seconds;
                }
                outputs.rows.push_back(row);
            }
        }
    }

    for (ResultRow& row : outputs.rows) {
        const auto it = anchor_seconds.find({row.sequence, row.block_size});
        if (it != anchor_seconds.end() && it->second > 0.0) {
            row.relative_time_pct = 100.0 * row.seconds / it->second;
        }
    }

    std::ofstream summary(cfg.out_dir / "results.csv");
    summary << "sequence,bs,mode,psnr_db,wspsnr_db\n";
    std::ofstream timing(cfg.out_dir / "timing.csv");
    timing << "sequence,bs,mode,seconds,relative_pct\n";
    for (const ResultRow& row : outputs.rows) {
        summary << row.sequence << ',' << row.block_size << ',' << mode_name(row.mode) << ','
                << format_db(row.psnr_db) << ',' << format_db(row.ws_psnr_db) << '\n';
        timing << row.sequence << ',' << row.block_size << ',' << mode_name(row.mode) << ','
               << std::fixed << std::setprecision(3) << row.seconds << ','
               << std::setprecision(1) << row.relative_time_pct << '\n';
    }
    return outputs;
}

RdOutputs run_rd(const ExperimentConfig& cfg) {
    if (cfg.inputs.empty()) throw std::invalid_argument("no input sequences");
    if (cfg.qp_list.size() < 4) {
        throw std::invalid_argument("qp list needs at least 4 entries for BD fitting");
    }
    std::filesystem::create_directories(cfg.out_dir);

    RdOutputs outputs;
    for (const auto& input : cfg.inputs) {
        const SequenceSource src = open_sequence(input);
        const std::string label = sequence_label(input);
        const FramePairPlan plan = plan_pairs(src.frame_count, cfg.pairs);

        std::map<int, Frame> frames;
        for (const auto& [t, r] : plan.pairs) {
            if (!frames.count(t)) frames.emplace(t, load_frame(src, t, cfg.downscale_to));
            if (!frames.count(r)) frames.emplace(r, load_frame(src, r, cfg.downscale_to));
        }

        for (const int bs : cfg.block_sizes) {
            std::map<EstimationMode, RdCurve> curves;
            for (const EstimationMode mode : cfg.modes) {
                // Average rate and quality over the pair plan at each QP.
                std::vector<std::vector<double>> rates(cfg.qp_list.size());
                std::vector<std::vector<double>> qualities(cfg.qp_list.size());
                RdSweepConfig sweep;
                sweep.qp_list = cfg.qp_list;
                sweep.threads = cfg.threads;
                for (const auto& [t, r] : plan.pairs) {
                    const RdCurve curve = rd_sweep(frames.at(t), frames.at(r), mode, bs, cfg.search,
                                                   cfg.iclk, sweep);
                    // rd_sweep sorts ascending by rate = descending QP
                    for (size_t i = 0; i < curve.points.size(); ++i) {
                        rates[i].push_back(curve.points[i].rate_bpp);
                        qualities[i].push_back(curve.points[i].quality_db);
                    }
                }
                RdCurve avg;
                avg.label = label + "-bs" + std::to_string(bs) + "-" + mode_name(mode);
                for (size_t i = 0; i < cfg.qp_list.size(); ++i) {
                    avg.points.push_back(RdPoint{mean(rates[i]), mean(qualities[i])});
                }
                curves[mode] = avg;
                outputs.curves.push_back(avg);
            }

            const auto anchor_it = curves.find(EstimationMode::MpaTranslational);
            if (anchor_it != curves.end()) {
                for (const auto& [mode, curve] : curves) {
                    outputs.bd_rows.push_back(RdOutputs::BdRow{
                        label, bs, mode, bd_rate(anchor_it->second, curve)});
                }
            }
        }
    }

    write_rd_csv(outputs.curves, cfg.out_dir / "rd.csv");
    std::ofstream report(cfg.out_dir / "bd_report.txt");
    report << "BD rate vs mpa-t anchor (negative = rate savings)\n";
    for (const auto& row : outputs.bd_rows) {
        report << row.sequence << " bs" << row.block_size << ' ' << mode_name(row.mode) << ": "
               << std::fixed << std::setprecision(2) << row.bd_rate_pct << " %\n";
    }
    return outputs;
}

std::string format_result_table(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(18) << "sequence" << std::setw(5) << "bs" << std::setw(10)
       << "mode" << std::right << std::setw(10) << "psnr" << std::setw(10) << "ws-psnr"
       << std::setw(10) << "time[s]" << std::setw(9) << "rel[%]" << '\n';
    for (const ResultRow& row : rows) {
        os << std::left << std::setw(18) << row.sequence << std::setw(5) << row.block_size
           << std::setw(10) << mode_name(row.mode) << std::right << std::fixed
           << std::setprecision(3) << std::setw(10) << row.psnr_db << std::setw(10)
           << row.ws_psnr_db << std::setw(10) << row.seconds << std::setprecision(1)
           << std::setw(9) << row.relative_time_pct << '\n';
    }
    return os.str();
}

}  // namespace mpa
