#pragma once

#include <filesystem>

#include "mpa/motion_model.hpp"
#include "mpa/video_io.hpp"

namespace mpa {

enum class SynthKind : uint8_t {
    Pan = 0,
    RotateSphere = 1,
    ZoomOnPlane = 2,
    AffineOnPlane = 3,
};

const char* synth_kind_name(SynthKind kind);
SynthKind synth_kind_from_name(const std::string& name);

struct SynthConfig {
    SynthKind kind = SynthKind::Pan;
    FrameGeometry geom{768, 384};
    int frames = 4;
    uint64_t seed = 1;
    int bit_depth = 8;

    double pan_px_per_frame = 1.0;

    Eigen::Vector3d rotation_axis{0.25, 1.0, 0.15};  // tilted so ERP motion is not a shift
    double rotation_deg_per_frame = 0.5;

    PlaneId plane = PlaneId::FrontBack;
    double zoom_per_frame = 0.02;        // ZoomOnPlane: a = d = zoom
    AffineParams affine_per_frame;       // AffineOnPlane step

    double noise_sigma = 0.0;  // additive per-frame noise after warping
};

// Band-limited texture: layered smooth noise octaves plus a few blobs.
Frame synthesize_base(const FrameGeometry& geom, int bit_depth, uint64_t seed);

// frame[t] is the base warped by the cumulative motion, so consecutive
// frames are related by exactly one per-frame step.
std::vector<Frame> synthesize_frames(const SynthConfig& cfg);

// Cumulative plane transform of frame t for the plane kinds.
AffineMatrix synth_cumulative_transform(const SynthConfig& cfg, int frame_index);

// Writes raw luma + sidecar + a json ground-truth parameter file.
SequenceSource synthesize_sequence(const SynthConfig& cfg, const std::filesystem::path& data_path);

}  // namespace mpa
