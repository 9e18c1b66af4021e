#include "mpa/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace mpa {

Frame::Frame(FrameGeometry geom, int bit_depth, uint16_t fill)
    : geom_(geom), bit_depth_(bit_depth),
      samples_(static_cast<size_t>(geom.width) * geom.height, fill) {
    if (bit_depth != 8 && bit_depth != 10) {
        throw std::invalid_argument("bit depth must be 8 or 10");
    }
}

Frame::Frame(FrameGeometry geom, int bit_depth, std::vector<uint16_t> samples)
    : geom_(geom), bit_depth_(bit_depth), samples_(std::move(samples)) {
    if (bit_depth != 8 && bit_depth != 10) {
        throw std::invalid_argument("bit depth must be 8 or 10");
    }
    if (samples_.size() != static_cast<size_t>(geom.width) * geom.height) {
        throw GeometryMismatch("sample count does not match geometry");
    }
}

double Frame::sample_wrapped(int row, int col) const {
    if (row < 0) row = 0;
    if (row >= geom_.height) row = geom_.height - 1;
    col %= geom_.width;
    if (col < 0) col += geom_.width;
    return static_cast<double>(at(row, col));
}

double Frame::sample_bilinear(PixelCoord px) const {
    const double u = px.u;
    const double v = px.v;
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const int c0 = static_cast<int>(fu);
    const int r0 = static_cast<int>(fv);
    const double du = u - fu;
    const double dv = v - fv;

    const double s00 = sample_wrapped(r0, c0);
    const double s01 = sample_wrapped(r0, c0 + 1);
    const double s10 = sample_wrapped(r0 + 1, c0);
    const double s11 = sample_wrapped(r0 + 1, c0 + 1);

    const double top = s00 + du * (s01 - s00);
    const double bottom = s10 + du * (s11 - s10);
    return top + dv * (bottom - top);
}

}  // namespace mpa
