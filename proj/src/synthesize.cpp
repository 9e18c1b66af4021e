#include "mpa/synthesize.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace mpa {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smooth value-noise layer: random lattice, bilinear interpolation, wrapped
// horizontally so the texture is seamless on the sphere.
void add_noise_octave(std::vector<double>& canvas, const FrameGeometry& geom, int cell,
                      double amplitude, std::mt19937_64& rng) {
    const int gw = (geom.width + cell - 1) / cell;
    const int gh = geom.height / cell + 2;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> lattice(static_cast<size_t>(gw) * gh);
    for (double& v : lattice) v = dist(rng);

    for (int r = 0; r < geom.height; ++r) {
        const double gy = static_cast<double>(r) / cell;
        const int y0 = static_cast<int>(gy);
        const double fy = gy - y0;
        for (int c = 0; c < geom.width; ++c) {
            const double gx = static_cast<double>(c) / cell;
            const int x0 = static_cast<int>(gx);
            const double fx = gx - x0;
            const int x1 = (x0 + 1) % gw;
            const double v00 = lattice[static_cast<size_t>(y0) * gw + x0];
            const double v01 = lattice[static_cast<size_t>(y0) * gw + x1];
            const double v10 = lattice[static_cast<size_t>(y0 + 1) * gw + x0];
            const double v11 = lattice[static_cast<size_t>(y0 + 1) * gw + x1];
            const double top = v00 + fx * (v01 - v00);
            const double bottom = v10 + fx * (v11 - v10);
            canvas[static_cast<size_t>(r) * geom.width + c] += amplitude * (top + fy * (bottom - top));
        }
    }
}

Frame render_warped(const Frame& base, const SynthConfig& cfg, int frame_index,
                    std::mt19937_64& noise_rng) {
    const FrameGeometry geom = base.geometry();
    Frame out(geom, base.bit_depth());
    const double max_value = out.max_value();

    std::vector<double> values(static_cast<size_t>(geom.width) * geom.height);
    switch (cfg.kind) {
        case SynthKind::Pan: {
            const double shift = cfg.pan_px_per_frame * frame_index;
            const double integral = std::round(shift);
            if (shift == integral) {
                // Integer pan is an exact circular shift.
                const int s = static_cast<int>(integral) % geom.width;
                for (int r = 0; r < geom.height; ++r) {
                    for (int c = 0; c < geom.width; ++c) {
                        int src = (c - s) % geom.width;
                        if (src < 0) src += geom.width;
                        values[static_cast<size_t>(r) * geom.width + c] = base.at(r, src);
                    }
                }
            } else {
                for (int r = 0; r < geom.height; ++r) {
                    for (int c = 0; c < geom.width; ++c) {
                        values[static_cast<size_t>(r) * geom.width + c] =
                            base.sample_bilinear({c - shift, static_cast<double>(r)});
                    }
                }
            }
            break;
        }
        case SynthKind::RotateSphere: {
            const double angle = -cfg.rotation_deg_per_frame * frame_index * kPi / 180.0;
            const Eigen::Matrix3d rot =
                Eigen::AngleAxisd(angle, cfg.rotation_axis.normalized()).toRotationMatrix();
            for (int r = 0; r < geom.height; ++r) {
                for (int c = 0; c < geom.width; ++c) {
                    const SpherePoint q = erp_to_sphere({static_cast<double>(c), static_cast<double>(r)}, geom);
                    values[static_cast<size_t>(r) * geom.width + c] =
                        base.sample_bilinear(sphere_to_erp(rot * q, geom));
                }
            }
            break;
        }
        case SynthKind::ZoomOnPlane:
        case SynthKind::AffineOnPlane: {
            const AffineMatrix m = synth_cumulative_transform(cfg, frame_index);
            const MotionPlane plane = plane_rotation(cfg.plane);
            for (int r = 0; r < geom.height; ++r) {
                for (int c = 0; c < geom.width; ++c) {
                    const PixelCoord px{static_cast<double>(c), static_cast<double>(r)};
                    double value;
                    const Eigen::Vector3d rotated = plane.rotation * erp_to_sphere(px, geom);
                    if (std::abs(rotated.z()) < kPlaneEpsilon) {
                        value = base.sample_bilinear(px);  // static band at the plane boundary
                    } else {
                        PlanePoint pt{rotated.x() / rotated.z(), rotated.y() / rotated.z(),
                                      rotated.z() > 0.0 ? +1 : -1};
                        PlanePoint moved{m(0, 0) * pt.x + m(0, 1) * pt.y + m(0, 2),
                                         m(1, 0) * pt.x + m(1, 1) * pt.y + m(1, 2), pt.hemisphere};
                        value = base.sample_bilinear(zeta_inv(moved, plane, geom));
                    }
                    values[static_cast<size_t>(r) * geom.width + c] = value;
                }
            }
            break;
        }
    }

    if (cfg.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (double& v : values) v += noise(noise_rng);
    }
    for (size_t i = 0; i < values.size(); ++i) {
        out.samples()[i] = static_cast<uint16_t>(std::clamp(std::round(values[i]), 0.0, max_value));
    }
    return out;
}

}  // namespace

const char* synth_kind_name(SynthKind kind) {
    switch (kind) {
        case SynthKind::Pan: return "pan";
        case SynthKind::RotateSphere: return "rotate-sphere";
        case SynthKind::ZoomOnPlane: return "zoom-on-plane";
        case SynthKind::AffineOnPlane: return "affine-on-plane";
    }
    return "?";
}

SynthKind synth_kind_from_name(const std::string& name) {
    if (name == "pan") return SynthKind::Pan;
    if (name == "rotate-sphere") return SynthKind::RotateSphere;
    if (name == "zoom-on-plane") return SynthKind::ZoomOnPlane;
    if (name == "affine-on-plane") return SynthKind::AffineOnPlane;
    throw std::invalid_argument("unknown synthetic kind: " + name);
}

Frame synthesize_base(const FrameGeometry& geom, int bit_depth, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> canvas(static_cast<size_t>(geom.width) * geom.height, 0.0);

    add_noise_octave(canvas, geom, 32, 1.0, rng);
    add_noise_octave(canvas, geom, 16, 0.55, rng);
    add_noise_octave(canvas, geom, 8, 0.3, rng);
    add_noise_octave(canvas, geom, 4, 0.12, rng);

    // A few broad blobs so flat-ish regions still carry structure.
    std::uniform_real_distribution<double> ux(0.0, geom.width);
    std::uniform_real_distribution<double> uy(0.0, geom.height);
    std::uniform_real_distribution<double> usigma(geom.height / 24.0, geom.height / 6.0);
    std::uniform_real_distribution<double> uamp(-0.8, 0.8);
    for (int blob = 0; blob < 24; ++blob) {
        const double cx = ux(rng);
        const double cy = uy(rng);
        const double sigma = usigma(rng);
        const double amp = uamp(rng);
        const int radius = static_cast<int>(3.0 * sigma);
        for (int r = std::max(0, static_cast<int>(cy) - radius);
             r < std::min(geom.height, static_cast<int>(cy) + radius); ++r) {
            for (int dc = -radius; dc <= radius; ++dc) {
                int c = (static_cast<int>(cx) + dc) % geom.width;
                if (c < 0) c += geom.width;
                const double dx = dc + (cx - std::floor(cx));
                const double dy = r - cy;
                canvas[static_cast<size_t>(r) * geom.width + c] +=
                    amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            }
        }
    }

    Frame out(geom, bit_depth);
    const double mid = (static_cast<double>(out.max_value()) + 1.0) / 2.0;
    const double scale = mid * 0.6;
    const double max_value = out.max_value();
    for (size_t i = 0; i < canvas.size(); ++i) {
        out.samples()[i] = static_cast<uint16_t>(
            std::clamp(std::round(mid + scale * canvas[i]), 0.0, max_value));
    }
    return out;
}

AffineMatrix synth_cumulative_transform(const SynthConfig& cfg, int frame_index) {
    AffineParams step(AffineModel::SixParam);
    if (cfg.kind == SynthKind::ZoomOnPlane) {
        step.values << cfg.zoom_per_frame, 0, 0, cfg.zoom_per_frame, 0, 0;
    } else if (cfg.kind == SynthKind::AffineOnPlane) {
        if (cfg.affine_per_frame.model == AffineModel::SixParam) {
            step = cfg.affine_per_frame;
        } else {
            const auto& v = cfg.affine_per_frame.values;
            step.values << v[0], v[1], -v[1], v[0], v[2], v[3];
        }
    } else {
        return AffineMatrix::Identity();
    }
    const AffineMatrix a = affine_matrix(step);
    AffineMatrix m = AffineMatrix::Identity();
    for (int i = 0; i < frame_index; ++i) m = m * a;
    return m;
}

std::vector<Frame> synthesize_frames(const SynthConfig& cfg) {
    const Frame base = synthesize_base(cfg.geom, cfg.bit_depth, cfg.seed);
    std::mt19937_64 noise_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<Frame> frames;
    frames.reserve(static_cast<size_t>(cfg.frames));
    for (int t = 0; t < cfg.frames; ++t) {
        frames.push_back(render_warped(base, cfg, t, noise_rng));
    }
    return frames;
}

SequenceSource synthesize_sequence(const SynthConfig& cfg, const std::filesystem::path& data_path) {
    SequenceSource src;
    src.path = data_path;
    src.geom = cfg.geom;
    src.bit_depth = cfg.bit_depth;
    src.chroma = ChromaLayout::LumaOnly;
    src.fps = 30.0;
    src.frame_count = cfg.frames;

    std::ofstream(data_path, std::ios::binary | std::ios::trunc).close();
    const std::vector<Frame> frames = synthesize_frames(cfg);
    for (const Frame& f : frames) append_luma(src, f);
    write_sidecar(src);

    nlohmann::json truth;
    truth["kind"] = synth_kind_name(cfg.kind);
    truth["seed"] = cfg.seed;
    truth["frames"] = cfg.frames;
    truth["width"] = cfg.geom.width;
    truth["height"] = cfg.geom.height;
    truth["depth"] = cfg.bit_depth;
    truth["noise_sigma"] = cfg.noise_sigma;
    nlohmann::json per_frame = nlohmann::json::array();
    for (int t = 0; t < cfg.frames; ++t) {
        nlohmann::json entry;
        entry["frame"] = t;
        switch (cfg.kind) {
            case SynthKind::Pan:
                entry["pan_px"] = cfg.pan_px_per_frame * t;
                break;
            case SynthKind::RotateSphere: {
                entry["axis"] = {cfg.rotation_axis.x(), cfg.rotation_axis.y(), cfg.rotation_axis.z()};
                entry["angle_deg"] = cfg.rotation_deg_per_frame * t;
                break;
            }
            case SynthKind::ZoomOnPlane:
            case SynthKind::AffineOnPlane: {
                const AffineMatrix m = synth_cumulative_transform(cfg, t);
                entry["plane"] = static_cast<int>(cfg.plane);
                entry["transform"] = {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2)};
                break;
            }
        }
        per_frame.push_back(entry);
    }
    truth["per_frame"] = per_frame;

    std::filesystem::path truth_path = data_path;
    truth_path += ".truth.json";
    std::ofstream truth_out(truth_path);
    if (!truth_out) throw IoError("cannot write ground truth: " + truth_path.string());
    truth_out << truth.dump(2) << "\n";
    return src;
}

}  // namespace mpa
