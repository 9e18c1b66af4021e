#pragma once

#include <filesystem>
#include <vector>

#include "mpa/motion_model.hpp"

namespace mpa {

enum class EstimationMode : uint8_t {
    Tmc = 0,
    MpaTranslational = 1,
    MpaIc6p = 2,
    MpaIc4p = 3,
};

const char* mode_name(EstimationMode mode);
EstimationMode mode_from_name(const std::string& name);

// One BlockMotion per block, row-major block order.
struct MotionField {
    FrameGeometry geom;
    int block_size = 16;
    EstimationMode mode = EstimationMode::MpaTranslational;
    std::vector<BlockMotion> blocks;

    int blocks_x() const { return geom.width / block_size; }
    int blocks_y() const { return geom.height / block_size; }

    PixelCoord block_center(int index) const;
};

// Fixed-point steps for transmitted parameters. Linear terms use 1/128;
// plane translations use a per-block pixel-equivalent step converted through
// the Jacobian scale at the block center.
inline constexpr double kLinearParamStep = 1.0 / 128.0;
inline constexpr double kAffineShiftPixelStep = 1.0 / 16.0;
inline constexpr double kTranslationPixelStep = 1.0 / 8.0;

// Largest plane displacement needed to move one pixel in any direction at
// this Jacobian (i.e. 1/sigma_min of d(u,v)/d(X,Y)).
double plane_units_per_pixel(const Eigen::Matrix2d& zeta_jac);
double block_plane_scale(const MotionField& field, int index);

// Quantize every block's parameters to the transmitted fixed-point grid and
// rebuild the motions from the quantized integers.
MotionField quantize_field(const MotionField& field);

std::vector<uint8_t> serialize_field(const MotionField& field);
MotionField deserialize_field(const std::vector<uint8_t>& bytes);

void save_field(const MotionField& field, const std::filesystem::path& path);
MotionField load_field(const std::filesystem::path& path);

}  // namespace mpa
