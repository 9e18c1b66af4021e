#pragma once

#include <cstdint>
#include <vector>

#include "mpa/geometry.hpp"

namespace mpa {

// Single luma raster. Samples are stored row major as unsigned integers in
// [0, 2^depth - 1]; the continuous accessor interpolates bilinearly with the
// sphere topology (horizontal wrap, vertical clamp).
class Frame {
  public:
    Frame() = default;
    Frame(FrameGeometry geom, int bit_depth, uint16_t fill = 0);
    Frame(FrameGeometry geom, int bit_depth, std::vector<uint16_t> samples);

    const FrameGeometry& geometry() const { return geom_; }
    int width() const { return geom_.width; }
    int height() const { return geom_.height; }
    int bit_depth() const { return bit_depth_; }
    uint16_t max_value() const { return static_cast<uint16_t>((1u << bit_depth_) - 1); }

    uint16_t at(int row, int col) const { return samples_[static_cast<size_t>(row) * geom_.width + col]; }
    uint16_t& at(int row, int col) { return samples_[static_cast<size_t>(row) * geom_.width + col]; }

    const std::vector<uint16_t>& samples() const { return samples_; }
    std::vector<uint16_t>& samples() { return samples_; }

    // Sample with horizontal wrap and vertical clamp. Exact at integer
    // coordinates (integers address pixel centers).
    double sample_wrapped(int row, int col) const;
    double sample_bilinear(PixelCoord px) const;

    bool same_raster(const Frame& other) const {
        return geom_ == other.geom_ && bit_depth_ == other.bit_depth_;
    }

    bool operator==(const Frame&) const = default;

  private:
    FrameGeometry geom_;
    int bit_depth_ = 8;
    std::vector<uint16_t> samples_;
};

inline double sample_bilinear(const Frame& frame, PixelCoord px) {
    return frame.sample_bilinear(px);
}

}  // namespace mpa
