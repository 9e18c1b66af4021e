#pragma once

#include <array>

#include "mpa/motion_compensation.hpp"
#include "mpa/quality_metrics.hpp"

namespace mpa {

using Block8 = std::array<double, 64>;
using Levels8 = std::array<int32_t, 64>;

// Base quantization matrix plus the QP multiplier applied on top of it.
struct QuantConfig {
    std::array<int, 64> base;  // row major 8x8, entries >= 1
    double qp_scale = 1.0;

    QuantConfig();
    explicit QuantConfig(double qp);

    void validate() const;
};

// Low-frequency weighted default: 16 + 6*(i+j), non-decreasing along the
// zigzag scan.
std::array<int, 64> default_quant_matrix();

// Orthonormal 2D type-II DCT and its inverse.
Block8 dct8_forward(const Block8& block);
Block8 dct8_inverse(const Block8& coeffs);

Levels8 quantize(const Block8& coeffs, const QuantConfig& cfg);
Block8 dequantize(const Levels8& levels, const QuantConfig& cfg);

struct RunLevel {
    int run = 0;       // zeros preceding the level, 0..63
    int32_t level = 0; // nonzero, except for the EOB marker
    bool eob = false;
};

std::vector<RunLevel> zigzag_runlevel(const Levels8& levels);
Levels8 runlevel_to_levels(const std::vector<RunLevel>& runlevels);

const std::array<int, 64>& zigzag_order();

// Motion parameter segment: fixed-point serialization of the field passed
// through a deterministic lossless byte compressor (zlib, level 9).
std::vector<uint8_t> compress_motion_params(const MotionField& field);
MotionField decompress_motion_params(const std::vector<uint8_t>& bytes);
size_t encode_motion_params_bits(const MotionField& field);

struct Bitstream {
    std::vector<uint8_t> bytes;

    size_t size_bits() const { return bytes.size() * 8; }
    double rate_bpp(const FrameGeometry& geom) const {
        return static_cast<double>(size_bits()) / (static_cast<double>(geom.width) * geom.height);
    }
};

struct EncodeResult {
    Bitstream bitstream;
    Frame reconstruction;
};

// The caller must pass the prediction assembled from the quantized field
// (quantize_field), which is exactly what the decoder will recompute.
EncodeResult encode_frame(const Frame& tmpl, const Frame& prediction, const MotionField& field,
                          const QuantConfig& cfg);

Frame decode_frame(const Bitstream& bitstream, const Frame& reference, int threads = 1);

// Estimate once, then encode the pair at every QP in the list.
struct RdSweepConfig {
    std::vector<double> qp_list{0.5, 1.0, 2.0, 4.0, 8.0};
    int threads = 1;
};

RdCurve rd_sweep(const Frame& tmpl, const Frame& reference, EstimationMode mode, int block_size,
                 const struct SearchConfig& search_cfg, const struct IcLkConfig& iclk_cfg,
                 const RdSweepConfig& sweep);

}  // namespace mpa
