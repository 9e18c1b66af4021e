#pragma once

#include <filesystem>
#include <string>

#include "mpa/frame.hpp"

namespace mpa {

enum class ChromaLayout : uint8_t {
    LumaOnly = 0,
    Planar420 = 1,
};

// Raw video file plus the sidecar metadata needed to address frames in it.
struct SequenceSource {
    std::filesystem::path path;
    FrameGeometry geom;
    int bit_depth = 8;
    ChromaLayout chroma = ChromaLayout::LumaOnly;
    double fps = 30.0;
    int frame_count = 0;

    size_t luma_bytes() const;
    size_t frame_bytes() const;
};

// Sidecar is a key=value text file: width, height, depth, chroma, fps.
// frame_count is derived from the data file size.
SequenceSource open_sequence(const std::filesystem::path& data_path);
void write_sidecar(const SequenceSource& src);

Frame read_luma(const SequenceSource& src, int index);
void append_luma(const SequenceSource& src, const Frame& frame);

Frame downscale(const Frame& frame, const FrameGeometry& target);

struct FramePairPlan {
    std::vector<std::pair<int, int>> pairs;  // (template, reference = template - 1)
};

FramePairPlan plan_pairs(int count_total, int pairs = 32);

void write_pgm(const Frame& frame, const std::filesystem::path& path);
Frame read_pgm(const std::filesystem::path& path);

}  // namespace mpa
