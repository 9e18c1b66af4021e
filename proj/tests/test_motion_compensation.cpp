#include <doctest.h>

#include <cmath>
#include <random>

#include "mpa/motion_compensation.hpp"

using namespace mpa;

namespace {

Frame ramp_frame(const FrameGeometry& geom) {
    Frame f(geom, 8);
    for (int r = 0; r < geom.height; ++r) {
        for (int c = 0; c < geom.width; ++c) {
            f.at(r, c) = static_cast<uint16_t>((r * 7 + c * 3) % 251);
        }
    }
    return f;
}

Frame noise_frame(const FrameGeometry& geom, uint64_t seed) {
    Frame f(geom, 8);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& s : f.samples()) s = static_cast<uint16_t>(dist(rng));
    return f;
}

MotionField identity_field(const FrameGeometry& geom, int bs) {
    MotionField field;
    field.geom = geom;
    field.block_size = bs;
    field.mode = EstimationMode::MpaTranslational;
    field.blocks.resize(static_cast<size_t>(field.blocks_x()) * field.blocks_y());
    for (size_t i = 0; i < field.blocks.size(); ++i) {
        field.blocks[i] = BlockMotion::translational(PlaneId::ErpDirect, +1, {0.0, 0.0});
    }
    return field;
}

}  // namespace

TEST_CASE("sample_bilinear basics") {
    const FrameGeometry geom(64, 32);
    Frame f(geom, 8);
    f.at(10, 20) = 100;
    f.at(10, 21) = 200;
    f.at(11, 20) = 100;
    f.at(11, 21) = 200;

    CHECK(f.sample_bilinear({20.0, 10.0}) == 100.0);
    CHECK(f.sample_bilinear({21.0, 10.0}) == 200.0);
    CHECK(f.sample_bilinear({20.5, 10.5}) == 150.0);
    // halfway between two equal samples
    CHECK(f.sample_bilinear({20.0, 10.5}) == 100.0);
}

TEST_CASE("bilinear is exact on a horizontal ramp") {
    const FrameGeometry geom(64, 32);
    Frame f(geom, 8);
    for (int r = 0; r < geom.height; ++r) {
        for (int c = 0; c < geom.width; ++c) f.at(r, c) = static_cast<uint16_t>(c);
    }
    CHECK(f.sample_bilinear({10.25, 5.0}) == doctest::Approx(10.25).epsilon(1e-12));
    CHECK(f.sample_bilinear({30.75, 17.5}) == doctest::Approx(30.75).epsilon(1e-12));
}

TEST_CASE("bilinear wraps horizontally and clamps vertically") {
    const FrameGeometry geom(64, 32);
    Frame f = ramp_frame(geom);
    CHECK(f.sample_bilinear({-1.0, 5.0}) == static_cast<double>(f.at(5, 63)));
    CHECK(f.sample_bilinear({64.0, 5.0}) == static_cast<double>(f.at(5, 0)));
    CHECK(f.sample_bilinear({5.0, -3.0}) == static_cast<double>(f.at(0, 5)));
    CHECK(f.sample_bilinear({5.0, 40.0}) == static_cast<double>(f.at(31, 5)));
}

TEST_CASE("predict_block identity copies the co-located block") {
    const FrameGeometry geom(768, 384);
    const Frame ref = ramp_frame(geom);
    const BlockSpec spec(96, 64, 16, geom);

    SUBCASE("erp identity") {
        const BlockMotion motion = BlockMotion::translational(PlaneId::ErpDirect, +1, {0.0, 0.0});
        const PredictedBlock block = predict_block(ref, spec, motion);
        for (int r = 0; r < 16; ++r) {
            for (int c = 0; c < 16; ++c) {
                CHECK(block.at(r, c) == static_cast<double>(ref.at(64 + r, 96 + c)));
            }
        }
    }

    SUBCASE("plane identity") {
        BlockMotion motion;
        motion.plane = PlaneId::FrontBack;
        motion.kind = MotionModelKind::Affine6;
        const MotionPlane plane = plane_rotation(PlaneId::FrontBack);
        motion.hemisphere =
            zeta({96 + 7.5, 64 + 7.5}, plane, geom).hemisphere;
        const BlockSpec center_spec(384 - 8, 192 - 8, 16, geom);
        const PredictedBlock block = predict_block(ref, center_spec, motion);
        double max_err = 0.0;
        for (int r = 0; r < 16; ++r) {
            for (int c = 0; c < 16; ++c) {
                max_err = std::max(max_err,
                                   std::abs(block.at(r, c) -
                                            ref.at(center_spec.origin_y + r, center_spec.origin_x + c)));
            }
        }
        CHECK(max_err < 1e-3);  // identity warp reproduces samples up to interpolation noise
    }
}

TEST_CASE("predict_block integer translation near the plane origin is a shifted copy") {
    const FrameGeometry geom(768, 384);
    // smooth content so sub-0.01 px warp curvature stays below 1 SSD/px
    Frame ref(geom, 8);
    for (int r = 0; r < geom.height; ++r) {
        for (int c = 0; c < geom.width; ++c) {
            ref.at(r, c) = static_cast<uint16_t>(
                128 + 60 * std::sin(2.0 * M_PI * c / 96.0) * std::cos(2.0 * M_PI * r / 64.0));
        }
    }

    const BlockSpec spec(384 - 16, 192 - 16, 32, geom);
    const MotionPlane plane = plane_rotation(PlaneId::FrontBack);
    const PlanePoint center = zeta({383.5, 191.5}, plane, geom);
    const Eigen::Matrix2d jac = zeta_jacobian(center, plane, geom);
    // plane displacement equivalent to exactly +3 px horizontally
    const Eigen::Vector2d t_plane = jac.inverse() * Eigen::Vector2d(3.0, 0.0);
    const BlockMotion motion =
        BlockMotion::translational(PlaneId::FrontBack, +1, {t_plane.x(), t_plane.y()});

    const PredictedBlock block = predict_block(ref, spec, motion);
    double ssd = 0.0;
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            const double expect = ref.at(spec.origin_y + r, spec.origin_x + c + 3);
            const double err = block.at(r, c) - expect;
            ssd += err * err;
        }
    }
    CHECK(ssd / (32.0 * 32.0) < 1.0);
}

TEST_CASE("double warp returns the block content up to interpolation noise") {
    const FrameGeometry geom(768, 384);
    Frame ref(geom, 8);
    for (int r = 0; r < geom.height; ++r) {
        for (int c = 0; c < geom.width; ++c) {
            ref.at(r, c) = static_cast<uint16_t>(
                128 + 50 * std::sin(2.0 * M_PI * c / 128.0) + 40 * std::cos(2.0 * M_PI * r / 96.0));
        }
    }
    AffineParams p(AffineModel::SixParam);
    p.values << 0.01, 0.004, -0.003, 0.008, 0.002, -0.001;
    const BlockMotion forward = BlockMotion::affine(PlaneId::FrontBack, +1, p);
    BlockMotion backward = forward;
    backward.transform = invert_affine(forward.transform);

    const BlockSpec spec(368, 176, 32, geom);
    // warp forward, then sample the warped raster backward
    const PredictedBlock warped = predict_block(ref, spec, forward);
    Frame warped_frame = ref;
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            warped_frame.at(spec.origin_y + r, spec.origin_x + c) = static_cast<uint16_t>(
                std::clamp(std::round(warped.at(r, c)), 0.0, 255.0));
        }
    }
    const PredictedBlock restored = predict_block(warped_frame, spec, backward);
    double ssd = 0.0;
    for (int r = 4; r < 28; ++r) {
        for (int c = 4; c < 28; ++c) {
            const double err = restored.at(r, c) - ref.at(spec.origin_y + r, spec.origin_x + c);
            ssd += err * err;
        }
    }
    CHECK(ssd / (24.0 * 24.0) < 4.0);
}

TEST_CASE("assemble_frame with identity motion is lossless") {
    const FrameGeometry geom(768, 384);
    const Frame ref = noise_frame(geom, 99);
    const MotionField field = identity_field(geom, 32);
    CHECK(field.blocks.size() == 12u * 24u);

    const Frame out = compensate_frame(ref, field);
    CHECK(out.samples() == ref.samples());
}

TEST_CASE("assemble_frame validates the tiling") {
    const FrameGeometry geom(64, 32);
    const Frame ref = ramp_frame(geom);

    std::vector<PredictedBlock> blocks;
    for (int by = 0; by < 2; ++by) {
        for (int bx = 0; bx < 4; ++bx) {
            PredictedBlock b;
            b.origin_x = bx * 16;
            b.origin_y = by * 16;
            b.size = 16;
            b.samples.assign(256, 300.0);  // above 8-bit range, must clip
            blocks.push_back(b);
        }
    }

    const Frame out = assemble_frame(blocks, geom, 8);
    for (uint16_t s : out.samples()) CHECK(s == 255);

    blocks.pop_back();
    CHECK_THROWS_AS(assemble_frame(blocks, geom, 8), IncompleteGrid);

    blocks.push_back(blocks.back());  // duplicate -> overlap
    CHECK_THROWS_AS(assemble_frame(blocks, geom, 8), IncompleteGrid);
}

TEST_CASE("prediction is independent of block processing order") {
    const FrameGeometry geom(768, 384);
    const Frame ref = noise_frame(geom, 5);
    MotionField field = identity_field(geom, 16);
    for (size_t i = 0; i < field.blocks.size(); ++i) {
        field.blocks[i] = BlockMotion::translational(PlaneId::ErpDirect, +1,
                                                     {static_cast<double>(i % 5) * 0.25, 0.5});
    }
    const Frame a = compensate_frame(ref, field, 1);
    const Frame b = compensate_frame(ref, field, 4);
    CHECK(a.samples() == b.samples());
}
