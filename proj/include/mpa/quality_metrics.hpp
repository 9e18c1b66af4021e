#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mpa/frame.hpp"

namespace mpa {

double psnr(const Frame& a, const Frame& b);

// PSNR with per-row cosine latitude weights compensating the equirectangular
// oversampling toward the poles.
double ws_psnr(const Frame& a, const Frame& b);

// Row weights, symmetric about the equator pair by construction.
std::vector<double> ws_weights(const FrameGeometry& geom);

struct RdPoint {
    double rate_bpp = 0.0;
    double quality_db = 0.0;
};

struct RdCurve {
    std::string label;
    std::vector<RdPoint> points;

    void validate() const;  // >= 4 points, strictly increasing rate
};

// Average percent rate difference between the two curves at equal quality
// (cubic fit of log-rate over quality). Negative means `test` saves rate.
double bd_rate(const RdCurve& anchor, const RdCurve& test);

void write_rd_csv(const std::vector<RdCurve>& curves, const std::filesystem::path& path);
std::vector<RdCurve> read_rd_csv(const std::filesystem::path& path);

}  // namespace mpa
