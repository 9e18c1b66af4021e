#pragma once

#include "mpa/frame.hpp"
#include "mpa/motion_field.hpp"

namespace mpa {

// Axis-aligned square block. Blocks sit on a grid that tiles the frame, so
// they never wrap horizontally themselves; only motion-compensated sample
// positions do.
struct BlockSpec {
    int origin_x = 0;
    int origin_y = 0;
    int size = 16;

    BlockSpec() = default;
    BlockSpec(int x, int y, int bs, const FrameGeometry& geom) : origin_x(x), origin_y(y), size(bs) {
        if (y < 0 || y + bs > geom.height || x < 0 || x + bs > geom.width) {
            throw GeometryMismatch("block outside frame");
        }
    }
};

// Real-valued prediction for one block; rounding happens at frame assembly.
struct PredictedBlock {
    int origin_x = 0;
    int origin_y = 0;
    int size = 0;
    std::vector<double> samples;  // size x size, row major

    double at(int r, int c) const { return samples[static_cast<size_t>(r) * size + c]; }
};

PredictedBlock predict_block(const Frame& reference, const BlockSpec& block,
                             const BlockMotion& motion);

Frame assemble_frame(const std::vector<PredictedBlock>& blocks, const FrameGeometry& geom,
                     int bit_depth);

// Predict every block of the field and assemble the full frame.
Frame compensate_frame(const Frame& reference, const MotionField& field, int threads = 1);

}  // namespace mpa
