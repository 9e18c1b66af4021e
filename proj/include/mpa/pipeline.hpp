#pragma once

#include <optional>

#include "mpa/motion_estimation.hpp"
#include "mpa/residual_codec.hpp"
#include "mpa/video_io.hpp"

namespace mpa {

struct ExperimentConfig {
    std::vector<std::filesystem::path> inputs;
    std::vector<EstimationMode> modes{EstimationMode::Tmc, EstimationMode::MpaTranslational,
                                      EstimationMode::MpaIc6p, EstimationMode::MpaIc4p};
    std::vector<int> block_sizes{16, 32};
    SearchConfig search;
    IcLkConfig iclk;
    std::vector<double> qp_list{0.5, 1.0, 2.0, 4.0, 8.0};
    int pairs = 32;
    uint64_t seed = 1;
    int threads = 1;
    std::filesystem::path out_dir;
    std::optional<FrameGeometry> downscale_to;
    bool save_fields = true;
    bool dump_predictions = false;
};

struct ResultRow {
    std::string sequence;
    int block_size = 0;
    EstimationMode mode = EstimationMode::MpaTranslational;
    double psnr_db = 0.0;
    double ws_psnr_db = 0.0;
    double seconds = 0.0;
    double relative_time_pct = 100.0;  // anchored on the plain translational run
};

struct EstimateOutputs {
    std::vector<ResultRow> rows;
};

// Per-pair estimation + compensation + metrics; writes results.csv,
// results_pairs.csv, timing.csv and the motion fields under out_dir.
// timing.csv is the only output that varies across runs and thread counts.
EstimateOutputs run_estimate(const ExperimentConfig& cfg);

struct RdOutputs {
    // one curve per (sequence, block size, mode), points averaged over pairs
    std::vector<RdCurve> curves;
    struct BdRow {
        std::string sequence;
        int block_size;
        EstimationMode mode;
        double bd_rate_pct;
    };
    std::vector<BdRow> bd_rows;
};

// RD sweep per mode with the translational MPA curve as the BD anchor;
// writes rd.csv and bd_report.txt under out_dir.
RdOutputs run_rd(const ExperimentConfig& cfg);

std::string format_result_table(const std::vector<ResultRow>& rows);

}  // namespace mpa
