#pragma once

#include <optional>

#include "mpa/motion_compensation.hpp"

namespace mpa {

struct SearchConfig {
    double search_range_px = 96.0;
    double subpel_precision = 0.125;  // must be a negative power of two

    void validate() const;
};

struct IcLkConfig {
    int max_iterations = 50;
    double convergence_epsilon = 1e-6;
    double step_gain = 2.0;
    double hessian_damping = 1e-8;  // relative to trace(H)/n
    bool divergence_guard = true;

    void validate() const;
};

struct EstimationResult {
    BlockMotion motion;
    double ssd = 0.0;
    int iterations = 0;
    bool converged = false;
    // Instrumentation: how many times the Hessian / steepest-descent stack
    // was built for this block. The inverse compositional scheme does it once.
    int precompute_count = 0;
    std::vector<double> ssd_history;  // SSD of each observed iterate
};

// Plane coordinates of every pixel of a block, shared by all search
// candidates. A block is admissible on a plane only if every pixel clears
// the epsilon guard and lands on one hemisphere.
struct PlaneBlockCoords {
    MotionPlane plane;
    bool admissible = false;
    int hemisphere = +1;
    std::vector<PlanePoint> points;   // size*size, row major
    double plane_units_per_px = 1.0;  // Jacobian scale at the block center
};

PlaneBlockCoords block_plane_coords(const BlockSpec& block, const MotionPlane& plane,
                                    const FrameGeometry& geom);

std::vector<double> block_samples(const Frame& frame, const BlockSpec& block);

double block_ssd(const std::vector<double>& tmpl, const std::vector<double>& pred);

// Translational diamond search on one motion plane. Large/small diamond
// integer phase followed by step halving down to the subpel precision.
std::pair<TranslationVector, double> diamond_search_translational(
    const Frame& tmpl, const BlockSpec& block, const Frame& reference,
    const MotionPlane& plane, const SearchConfig& cfg);

// Same search run directly on equirectangular pixel coordinates.
std::pair<TranslationVector, double> diamond_search_erp(const Frame& tmpl, const BlockSpec& block,
                                                        const Frame& reference,
                                                        const SearchConfig& cfg);

struct PlaneSearchResult {
    MotionPlane plane;
    TranslationVector translation;
    double ssd = 0.0;
    int hemisphere = +1;
};

PlaneSearchResult select_best_plane(const Frame& tmpl, const BlockSpec& block,
                                    const Frame& reference, const SearchConfig& cfg);

// Steepest-descent images and the one-time inverse Hessian of the inverse
// compositional solver.
struct IclkPrecompute {
    Eigen::MatrixXd steepest_descent;  // (pixels, n)
    Eigen::MatrixXd hessian_inverse;   // (n, n)
};

IclkPrecompute iclk_precompute(const Frame& tmpl, const BlockSpec& block,
                               const PlaneBlockCoords& coords, AffineModel model,
                               double damping = 1e-8);

EstimationResult iclk_refine(const Frame& tmpl, const BlockSpec& block, const Frame& reference,
                             const BlockMotion& init, AffineModel model, const IcLkConfig& cfg);

struct FrameEstimate {
    MotionField field;
    std::vector<EstimationResult> results;
};

FrameEstimate estimate_frame(const Frame& tmpl, const Frame& reference, EstimationMode mode,
                             int block_size, const SearchConfig& search_cfg,
                             const IcLkConfig& iclk_cfg, int threads = 1);

}  // namespace mpa
