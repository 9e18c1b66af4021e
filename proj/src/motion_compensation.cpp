#include "mpa/motion_compensation.hpp"

#include <cmath>

#include "mpa/parallel.hpp"

namespace mpa {

PredictedBlock predict_block(const Frame& reference, const BlockSpec& block,
                             const BlockMotion& motion) {
    PredictedBlock out;
    out.origin_x = block.origin_x;
    out.origin_y = block.origin_y;
    out.size = block.size;
    out.samples.resize(static_cast<size_t>(block.size) * block.size);

    const FrameGeometry& geom = reference.geometry();
    if (motion.plane == PlaneId::ErpDirect) {
        const double tu = motion.transform(0, 2);
        const double tv = motion.transform(1, 2);
        for (int r = 0; r < block.size; ++r) {
            for (int c = 0; c < block.size; ++c) {
                const PixelCoord px{block.origin_x + c + tu, block.origin_y + r + tv};
                out.samples[static_cast<size_t>(r) * block.size + c] = reference.sample_bilinear(px);
            }
        }
        return out;
    }

    const MotionPlane plane = plane_rotation(motion.plane);
    for (int r = 0; r < block.size; ++r) {
        for (int c = 0; c < block.size; ++c) {
            const PixelCoord px{static_cast<double>(block.origin_x + c),
                                static_cast<double>(block.origin_y + r)};
            const PlanePoint pt = zeta(px, plane, geom);
            const PixelCoord warped = mpa_warp_plane(pt, motion, plane, geom);
            out.samples[static_cast<size_t>(r) * block.size + c] = reference.sample_bilinear(warped);
        }
    }
    return out;
}

Frame assemble_frame(const std::vector<PredictedBlock>& blocks, const FrameGeometry& geom,
                     int bit_depth) {
    Frame out(geom, bit_depth);
    std::vector<uint8_t> covered(static_cast<size_t>(geom.width) * geom.height, 0);
    const double max_value = out.max_value();
    for (const PredictedBlock& b : blocks) {
        for (int r = 0; r < b.size; ++r) {
            const int row = b.origin_y + r;
            if (row < 0 || row >= geom.height) throw IncompleteGrid("block row outside frame");
            for (int c = 0; c < b.size; ++c) {
                const int col = b.origin_x + c;
                if (col < 0 || col >= geom.width) throw IncompleteGrid("block column outside frame");
                const size_t idx = static_cast<size_t>(row) * geom.width + col;
                if (covered[idx]) throw IncompleteGrid("overlapping blocks");
                covered[idx] = 1;
                const double value = std::clamp(std::round(b.at(r, c)), 0.0, max_value);
                out.samples()[idx] = static_cast<uint16_t>(value);
            }
        }
    }
    for (uint8_t c : covered) {
        if (!c) throw IncompleteGrid("grid does not cover the frame");
    }
    return out;
}

Frame compensate_frame(const Frame& reference, const MotionField& field, int threads) {
    if (!(field.geom == reference.geometry())) {
        throw GeometryMismatch("field and reference geometry differ");
    }
    const int bs = field.block_size;
    const int bx = field.blocks_x();
    const int n = static_cast<int>(field.blocks.size());
    std::vector<PredictedBlock> blocks(static_cast<size_t>(n));
    parallel_for(n, threads, [&](int i) {
        const BlockSpec spec((i % bx) * bs, (i / bx) * bs, bs, field.geom);
        blocks[static_cast<size_t>(i)] = predict_block(reference, spec, field.blocks[static_cast<size_t>(i)]);
    });
    return assemble_frame(blocks, field.geom, reference.bit_depth());
}

}  // namespace mpa
