#include "mpa/motion_field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace mpa {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'A', 'F'};
constexpr uint8_t kVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
}

void put_i32(std::vector<uint8_t>& out, int32_t v) { put_u32(out, static_cast<uint32_t>(v)); }

struct Cursor {
    const std::vector<uint8_t>& data;
    size_t pos = 0;

    uint8_t u8() {
        if (pos >= data.size()) throw MalformedSequence("motion field data truncated");
        return data[pos++];
    }
    uint16_t u16() {
        uint16_t lo = u8(), hi = u8();
        return static_cast<uint16_t>(lo | (hi << 8));
    }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
};

int param_count(MotionModelKind kind) {
    switch (kind) {
        case MotionModelKind::Translational: return 2;
        case MotionModelKind::Affine4: return 4;
        case MotionModelKind::Affine6: return 6;
    }
    throw MalformedSequence("bad model kind");
}

int32_t to_fixed(double v, double step) {
    return static_cast<int32_t>(std::lround(v / step));
}

// Steps for each transmitted parameter of a block, in serialization order.
std::vector<double> param_steps(const BlockMotion& motion, double plane_scale) {
    const bool erp = motion.plane == PlaneId::ErpDirect;
    const double shift_step =
        erp ? kTranslationPixelStep
            : (motion.kind == MotionModelKind::Translational ? kTranslationPixelStep * plane_scale
                                                             : kAffineShiftPixelStep * plane_scale);
    switch (motion.kind) {
        case MotionModelKind::Translational:
            return {shift_step, shift_step};
        case MotionModelKind::Affine4:
            return {kLinearParamStep, kLinearParamStep, shift_step, shift_step};
        case MotionModelKind::Affine6:
            return {kLinearParamStep, kLinearParamStep, kLinearParamStep,
                    kLinearParamStep, shift_step, shift_step};
    }
    throw MalformedSequence("bad model kind");
}

std::vector<double> raw_params(const BlockMotion& motion) {
    switch (motion.kind) {
        case MotionModelKind::Translational:
            return {motion.transform(0, 2), motion.transform(1, 2)};
        case MotionModelKind::Affine4: {
            const AffineParams p = motion.params();
            return {p.values[0], p.values[1], p.values[2], p.values[3]};
        }
        case MotionModelKind::Affine6: {
            const AffineParams p = motion.params();
            return {p.values[0], p.values[1], p.values[2], p.values[3], p.values[4], p.values[5]};
        }
    }
    throw MalformedSequence("bad model kind");
}

BlockMotion rebuild(PlaneId plane, MotionModelKind kind, int hemisphere,
                    const std::vector<double>& vals) {
    switch (kind) {
        case MotionModelKind::Translational:
            return BlockMotion::translational(plane, hemisphere, {vals[0], vals[1]});
        case MotionModelKind::Affine4: {
            AffineParams p(AffineModel::FourParam);
            p.values << vals[0], vals[1], vals[2], vals[3];
            return BlockMotion::affine(plane, hemisphere, p);
        }
        case MotionModelKind::Affine6: {
            AffineParams p(AffineModel::SixParam);
            p.values << vals[0], vals[1], vals[2], vals[3], vals[4], vals[5];
            return BlockMotion::affine(plane, hemisphere, p);
        }
    }
    throw MalformedSequence("bad model kind");
}

}  // namespace

const char* mode_name(EstimationMode mode) {
    switch (mode) {
        case EstimationMode::Tmc: return "tmc";
        case EstimationMode::MpaTranslational: return "mpa-t";
        case EstimationMode::MpaIc6p: return "mpa-ic6p";
        case EstimationMode::MpaIc4p: return "mpa-ic4p";
    }
    return "?";
}

EstimationMode mode_from_name(const std::string& name) {
    if (name == "tmc") return EstimationMode::Tmc;
    if (name == "mpa-t") return EstimationMode::MpaTranslational;
    if (name == "mpa-ic6p") return EstimationMode::MpaIc6p;
    if (name == "mpa-ic4p") return EstimationMode::MpaIc4p;
    throw std::invalid_argument("unknown mode: " + name);
}

PixelCoord MotionField::block_center(int index) const {
    const int bx = index % blocks_x();
    const int by = index / blocks_x();
    const double half = 0.5 * block_size - 0.5;
    return {bx * block_size + half, by * block_size + half};
}

double plane_units_per_pixel(const Eigen::Matrix2d& zeta_jac) {
    // Smallest singular value of the 2x2 Jacobian, in closed form.
    const double t = zeta_jac.squaredNorm();
    const double d = zeta_jac.determinant();
    const double disc = std::sqrt(std::max(t * t - 4.0 * d * d, 0.0));
    const double lmin = std::max(0.5 * (t - disc), 1e-300);
    return 1.0 / std::sqrt(lmin);
}

double block_plane_scale(const MotionField& field, int index) {
    const BlockMotion& motion = field.blocks[index];
    if (motion.plane == PlaneId::ErpDirect) return 1.0;
    const MotionPlane plane = plane_rotation(motion.plane);
    PlanePoint pt = zeta(field.block_center(index), plane, field.geom);
    pt.hemisphere = motion.hemisphere;
    return plane_units_per_pixel(zeta_jacobian(pt, plane, field.geom));
}

MotionField quantize_field(const MotionField& field) {
    MotionField out = field;
    for (size_t i = 0; i < field.blocks.size(); ++i) {
        const BlockMotion& motion = field.blocks[i];
        const double scale = block_plane_scale(field, static_cast<int>(i));
        const std::vector<double> steps = param_steps(motion, scale);
        std::vector<double> vals = raw_params(motion);
        for (size_t k = 0; k < vals.size(); ++k) {
            vals[k] = to_fixed(vals[k], steps[k]) * steps[k];
        }
        out.blocks[i] = rebuild(motion.plane, motion.kind, motion.hemisphere, vals);
    }
    return out;
}

std::vector<uint8_t> serialize_field(const MotionField& field) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    put_u32(out, static_cast<uint32_t>(field.geom.width));
    put_u32(out, static_cast<uint32_t>(field.geom.height));
    put_u16(out, static_cast<uint16_t>(field.block_size));
    out.push_back(static_cast<uint8_t>(field.mode));
    put_u32(out, static_cast<uint32_t>(field.blocks.size()));
    for (size_t i = 0; i < field.blocks.size(); ++i) {
        const BlockMotion& motion = field.blocks[i];
        out.push_back(static_cast<uint8_t>(motion.plane));
        out.push_back(static_cast<uint8_t>(motion.kind));
        out.push_back(static_cast<uint8_t>(motion.hemisphere >= 0 ? 1 : 0xff));
        const double scale = block_plane_scale(field, static_cast<int>(i));
        const std::vector<double> steps = param_steps(motion, scale);
        const std::vector<double> vals = raw_params(motion);
        for (size_t k = 0; k < vals.size(); ++k) {
            put_i32(out, to_fixed(vals[k], steps[k]));
        }
    }
    return out;
}

MotionField deserialize_field(const std::vector<uint8_t>& bytes) {
    Cursor c{bytes};
    char magic[4];
    for (char& ch : magic) ch = static_cast<char>(c.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) throw MalformedSequence("bad MPAF magic");
    if (c.u8() != kVersion) throw MalformedSequence("unsupported MPAF version");

    MotionField field;
    const int w = static_cast<int>(c.u32());
    const int h = static_cast<int>(c.u32());
    field.geom = FrameGeometry(w, h);
    field.block_size = c.u16();
    field.mode = static_cast<EstimationMode>(c.u8());
    const uint32_t count = c.u32();
    const uint32_t expected = static_cast<uint32_t>((w / field.block_size) * (h / field.block_size));
    if (count != expected) throw MalformedSequence("block count does not match geometry");

    field.blocks.resize(count);
    for (uint32_t i = 0; i < count; ++i) {
        const PlaneId plane = static_cast<PlaneId>(c.u8());
        const MotionModelKind kind = static_cast<MotionModelKind>(c.u8());
        const uint8_t hem_raw = c.u8();
        const int hemisphere = hem_raw == 1 ? +1 : -1;
        // The plane scale depends only on the block position, plane and
        // hemisphere, so the decoder recomputes the same steps.
        field.blocks[i].plane = plane;
        field.blocks[i].kind = kind;
        field.blocks[i].hemisphere = hemisphere;
        const double scale = block_plane_scale(field, static_cast<int>(i));
        BlockMotion probe;
        probe.plane = plane;
        probe.kind = kind;
        const std::vector<double> steps = param_steps(probe, scale);
        std::vector<double> vals(param_count(kind));
        for (int k = 0; k < param_count(kind); ++k) {
            vals[static_cast<size_t>(k)] = c.i32() * steps[static_cast<size_t>(k)];
        }
        field.blocks[i] = rebuild(plane, kind, hemisphere, vals);
    }
    if (c.pos != bytes.size()) throw MalformedSequence("trailing bytes after motion field");
    return field;
}

void save_field(const MotionField& field, const std::filesystem::path& path) {
    const std::vector<uint8_t> bytes = serialize_field(field);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

MotionField load_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_field(bytes);
}

}  // namespace mpa
