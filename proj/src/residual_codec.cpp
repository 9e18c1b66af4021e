#include "mpa/residual_codec.hpp"

#include <cmath>
#include <cstring>
#include <zlib.h>

#include "mpa/huffman.hpp"
#include "mpa/motion_estimation.hpp"

namespace mpa {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'A', 'C'};
constexpr uint8_t kVersion = 1;
constexpr uint32_t kEobSymbol = 0;
constexpr int kMaxCategory = 40;

const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, 8>, 8> c{};
        const double pi = 3.14159265358979323846;
        for (int k = 0; k < 8; ++k) {
            const double alpha = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int n = 0; n < 8; ++n) {
                c[k][n] = alpha * std::cos((2 * n + 1) * k * pi / 16.0);
            }
        }
        return c;
    }();
    return basis;
}

int category_of(int32_t level) {
    uint32_t magnitude = static_cast<uint32_t>(level < 0 ? -static_cast<int64_t>(level) : level);
    int bits = 0;
    while (magnitude) {
        ++bits;
        magnitude >>= 1;
    }
    return bits;
}

uint32_t runlevel_symbol(int run, int category) {
    return 1 + static_cast<uint32_t>(run) * kMaxCategory + static_cast<uint32_t>(category - 1);
}

// Sign folded into the low end of the magnitude range, as in JPEG.
uint64_t level_extra_bits(int32_t level, int category) {
    if (level > 0) return static_cast<uint64_t>(level);
    return static_cast<uint64_t>(level + (int64_t(1) << category) - 1);
}

int32_t level_from_extra(uint64_t extra, int category) {
    const int64_t half = int64_t(1) << (category - 1);
    if (static_cast<int64_t>(extra) >= half) return static_cast<int32_t>(extra);
    return static_cast<int32_t>(static_cast<int64_t>(extra) - (int64_t(1) << category) + 1);
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const std::vector<uint8_t>& data, size_t& pos) {
    if (pos + 4 > data.size()) throw MalformedSequence("bitstream truncated");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data[pos++]) << (8 * i);
    return v;
}

std::vector<uint8_t> zlib_deflate(const std::vector<uint8_t>& input) {
    uLongf bound = compressBound(static_cast<uLong>(input.size()));
    std::vector<uint8_t> out(bound);
    if (compress2(out.data(), &bound, input.data(), static_cast<uLong>(input.size()), 9) != Z_OK) {
        throw IoError("zlib compression failed");
    }
    out.resize(bound);
    return out;
}

std::vector<uint8_t> zlib_inflate(const std::vector<uint8_t>& input, size_t raw_size) {
    std::vector<uint8_t> out(raw_size);
    uLongf size = static_cast<uLongf>(raw_size);
    if (uncompress(out.data(), &size, input.data(), static_cast<uLong>(input.size())) != Z_OK ||
        size != raw_size) {
        throw MalformedSequence("zlib decompression failed");
    }
    return out;
}

}  // namespace

std::array<int, 64> default_quant_matrix() {
    std::array<int, 64> q{};
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) q[static_cast<size_t>(i) * 8 + j] = 16 + 6 * (i + j);
    }
    return q;
}

QuantConfig::QuantConfig() : base(default_quant_matrix()) {}
QuantConfig::QuantConfig(double qp) : base(default_quant_matrix()), qp_scale(qp) { validate(); }

void QuantConfig::validate() const {
    if (!(qp_scale > 0.0)) throw std::invalid_argument("qp_scale must be positive");
    for (int v : base) {
        if (v < 1) throw std::invalid_argument("quantization matrix entries must be >= 1");
    }
}

Block8 dct8_forward(const Block8& block) {
    const auto& c = dct_basis();
    Block8 tmp{};
    // rows
    for (int r = 0; r < 8; ++r) {
        for (int k = 0; k < 8; ++k) {
            double acc = 0.0;
            for (int n = 0; n < 8; ++n) acc += c[k][n] * block[static_cast<size_t>(r) * 8 + n];
            tmp[static_cast<size_t>(r) * 8 + k] = acc;
        }
    }
    Block8 out{};
    // columns
    for (int k = 0; k < 8; ++k) {
        for (int col = 0; col < 8; ++col) {
            double acc = 0.0;
            for (int n = 0; n < 8; ++n) acc += c[k][n] * tmp[static_cast<size_t>(n) * 8 + col];
            out[static_cast<size_t>(k) * 8 + col] = acc;
        }
    }
    return out;
}

Block8 dct8_inverse(const Block8& coeffs) {
    const auto& c = dct_basis();
    Block8 tmp{};
    for (int n = 0; n < 8; ++n) {
        for (int col = 0; col < 8; ++col) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += c[k][n] * coeffs[static_cast<size_t>(k) * 8 + col];
            tmp[static_cast<size_t>(n) * 8 + col] = acc;
        }
    }
    Block8 out{};
    for (int r = 0; r < 8; ++r) {
        for (int n = 0; n < 8; ++n) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += c[k][n] * tmp[static_cast<size_t>(r) * 8 + k];
            out[static_cast<size_t>(r) * 8 + n] = acc;
        }
    }
    return out;
}

Levels8 quantize(const Block8& coeffs, const QuantConfig& cfg) {
    Levels8 out{};
    for (size_t i = 0; i < 64; ++i) {
        // lround ties away from zero
        out[i] = static_cast<int32_t>(std::lround(coeffs[i] / (cfg.qp_scale * cfg.base[i])));
    }
    return out;
}

Block8 dequantize(const Levels8& levels, const QuantConfig& cfg) {
    Block8 out{};
    for (size_t i = 0; i < 64; ++i) {
        out[i] = static_cast<double>(levels[i]) * cfg.qp_scale * cfg.base[i];
    }
    return out;
}

const std::array<int, 64>& zigzag_order() {
    static const auto order = [] {
        std::array<int, 64> zz{};
        int idx = 0;
        for (int s = 0; s < 15; ++s) {
            if (s % 2 == 0) {  // up-right
                for (int i = std::min(s, 7); i >= std::max(0, s - 7); --i) {
                    zz[static_cast<size_t>(idx++)] = i * 8 + (s - i);
                }
            } else {  // down-left
                for (int i = std::max(0, s - 7); i <= std::min(s, 7); ++i) {
                    zz[static_cast<size_t>(idx++)] = i * 8 + (s - i);
                }
            }
        }
        return zz;
    }();
    return order;
}

std::vector<RunLevel> zigzag_runlevel(const Levels8& levels) {
    const auto& order = zigzag_order();
    std::vector<RunLevel> out;
    int run = 0;
    for (int i = 0; i < 64; ++i) {
        const int32_t level = levels[static_cast<size_t>(order[static_cast<size_t>(i)])];
        if (level == 0) {
            ++run;
        } else {
            out.push_back(RunLevel{run, level, false});
            run = 0;
        }
    }
    out.push_back(RunLevel{0, 0, true});
    return out;
}

Levels8 runlevel_to_levels(const std::vector<RunLevel>& runlevels) {
    const auto& order = zigzag_order();
    Levels8 out{};
    int pos = 0;
    bool terminated = false;
    for (const RunLevel& rl : runlevels) {
        if (terminated) throw MalformedSequence("symbols after end of block");
        if (rl.eob) {
            terminated = true;
            continue;
        }
        if (rl.level == 0) throw MalformedSequence("zero level in run-level pair");
        pos += rl.run;
        if (pos >= 64) throw MalformedSequence("run overflows the block");
        out[static_cast<size_t>(order[static_cast<size_t>(pos)])] = rl.level;
        ++pos;
    }
    if (!terminated) throw MalformedSequence("missing end-of-block");
    return out;
}

std::vector<uint8_t> compress_motion_params(const MotionField& field) {
    // Self-describing segment: u32 raw size, then the deflate stream.
    const std::vector<uint8_t> raw = serialize_field(field);
    std::vector<uint8_t> out;
    put_u32(out, static_cast<uint32_t>(raw.size()));
    const std::vector<uint8_t> packed = zlib_deflate(raw);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

MotionField decompress_motion_params(const std::vector<uint8_t>& bytes) {
    size_t pos = 0;
    const uint32_t raw_size = get_u32(bytes, pos);
    const std::vector<uint8_t> packed(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return deserialize_field(zlib_inflate(packed, raw_size));
}

size_t encode_motion_params_bits(const MotionField& field) {
    return compress_motion_params(field).size() * 8;
}

namespace {

struct TileCodes {
    std::vector<RunLevel> runlevels;
};

void encode_block_symbols(const std::vector<RunLevel>& runlevels, const HuffmanCode& code,
                          BitWriter& writer) {
    for (const RunLevel& rl : runlevels) {
        if (rl.eob) {
            code.encode(writer, kEobSymbol);
            continue;
        }
        const int category = category_of(rl.level);
        code.encode(writer, runlevel_symbol(rl.run, category));
        writer.put_bits(level_extra_bits(rl.level, category), category);
    }
}

std::vector<RunLevel> decode_block_symbols(const HuffmanCode& code, BitReader& reader) {
    std::vector<RunLevel> out;
    int filled = 0;
    while (true) {
        const uint32_t symbol = code.decode(reader);
        if (symbol == kEobSymbol) {
            out.push_back(RunLevel{0, 0, true});
            return out;
        }
        const int run = static_cast<int>((symbol - 1) / kMaxCategory);
        const int category = static_cast<int>((symbol - 1) % kMaxCategory) + 1;
        const uint64_t extra = reader.get_bits(category);
        const int32_t level = level_from_extra(extra, category);
        if (level == 0) throw MalformedSequence("decoded zero level");
        filled += run + 1;
        if (filled > 64) throw MalformedSequence("run overflows the block");
        out.push_back(RunLevel{run, level, false});
    }
}

// Shared by encoder and decoder so the reconstruction is bit exact.
Frame reconstruct(const Frame& prediction, const std::vector<Levels8>& tiles,
                  const QuantConfig& cfg) {
    const FrameGeometry geom = prediction.geometry();
    Frame out(geom, prediction.bit_depth());
    const int tiles_x = geom.width / 8;
    const double max_value = out.max_value();
    for (size_t t = 0; t < tiles.size(); ++t) {
        const int ty = static_cast<int>(t) / tiles_x;
        const int tx = static_cast<int>(t) % tiles_x;
        const Block8 residual = dct8_inverse(dequantize(tiles[t], cfg));
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                const int row = ty * 8 + r;
                const int col = tx * 8 + c;
                const double value = prediction.at(row, col) + residual[static_cast<size_t>(r) * 8 + c];
                out.at(row, col) =
                    static_cast<uint16_t>(std::clamp(std::round(value), 0.0, max_value));
            }
        }
    }
    return out;
}

}  // namespace

EncodeResult encode_frame(const Frame& tmpl, const Frame& prediction, const MotionField& field,
                          const QuantConfig& cfg) {
    cfg.validate();
    if (!tmpl.same_raster(prediction)) throw GeometryMismatch("template/prediction raster differ");
    if (!(field.geom == tmpl.geometry())) throw GeometryMismatch("field geometry differs");
    const FrameGeometry geom = tmpl.geometry();
    if (geom.width % 8 != 0 || geom.height % 8 != 0) {
        throw GeometryMismatch("frame dimensions must be divisible by 8");
    }

    const int tiles_x = geom.width / 8;
    const int tiles_y = geom.height / 8;
    const int32_t max_residual = tmpl.max_value();

    std::vector<Levels8> tiles(static_cast<size_t>(tiles_x) * tiles_y);
    std::vector<TileCodes> codes(tiles.size());
    std::unordered_map<uint32_t, uint64_t> histogram;

    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            Block8 residual{};
            for (int r = 0; r < 8; ++r) {
                for (int c = 0; c < 8; ++c) {
                    const int row = ty * 8 + r;
                    const int col = tx * 8 + c;
                    int32_t diff = static_cast<int32_t>(tmpl.at(row, col)) -
                                   static_cast<int32_t>(prediction.at(row, col));
                    diff = std::clamp(diff, -max_residual, max_residual);
                    residual[static_cast<size_t>(r) * 8 + c] = static_cast<double>(diff);
                }
            }
            const size_t t = static_cast<size_t>(ty) * tiles_x + tx;
            tiles[t] = quantize(dct8_forward(residual), cfg);
            codes[t].runlevels = zigzag_runlevel(tiles[t]);
            for (const RunLevel& rl : codes[t].runlevels) {
                if (rl.eob) {
                    ++histogram[kEobSymbol];
                } else {
                    ++histogram[runlevel_symbol(rl.run, category_of(rl.level))];
                }
            }
        }
    }

    const HuffmanCode huffman = HuffmanCode::from_histogram(histogram);

    Bitstream bs;
    auto& out = bs.bytes;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    put_u32(out, static_cast<uint32_t>(geom.width));
    put_u32(out, static_cast<uint32_t>(geom.height));
    out.push_back(static_cast<uint8_t>(tmpl.bit_depth()));
    out.push_back(static_cast<uint8_t>(field.block_size & 0xff));
    out.push_back(static_cast<uint8_t>((field.block_size >> 8) & 0xff));
    out.push_back(static_cast<uint8_t>(field.mode));
    uint64_t qp_bits = 0;
    static_assert(sizeof(double) == 8);
    std::memcpy(&qp_bits, &cfg.qp_scale, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((qp_bits >> (8 * i)) & 0xff));

    // Motion parameter segment: u32 compressed length, u32 raw length, data.
    const std::vector<uint8_t> raw_field = serialize_field(field);
    const std::vector<uint8_t> packed_field = zlib_deflate(raw_field);
    put_u32(out, static_cast<uint32_t>(packed_field.size()));
    put_u32(out, static_cast<uint32_t>(raw_field.size()));
    out.insert(out.end(), packed_field.begin(), packed_field.end());

    huffman.serialize(out);

    BitWriter writer;
    for (const TileCodes& tc : codes) {
        encode_block_symbols(tc.runlevels, huffman, writer);
    }
    const std::vector<uint8_t> coded = writer.finish();
    put_u32(out, static_cast<uint32_t>(coded.size()));
    out.insert(out.end(), coded.begin(), coded.end());

    EncodeResult result{std::move(bs), reconstruct(prediction, tiles, cfg)};
    return result;
}

Frame decode_frame(const Bitstream& bitstream, const Frame& reference, int threads) {
    const auto& data = bitstream.bytes;
    if (data.size() < 5 || std::memcmp(data.data(), kMagic, 4) != 0) {
        throw MalformedSequence("bad MPAC magic");
    }
    if (data[4] != kVersion) throw MalformedSequence("unsupported MPAC version");
    size_t pos = 5;
    const int width = static_cast<int>(get_u32(data, pos));
    const int height = static_cast<int>(get_u32(data, pos));
    if (pos + 4 > data.size()) throw MalformedSequence("bitstream truncated");
    const int depth = data[pos++];
    const int block_size = data[pos] | (data[pos + 1] << 8);
    pos += 2;
    ++pos;  // mode, informative; the field carries it too
    if (pos + 8 > data.size()) throw MalformedSequence("bitstream truncated");
    uint64_t qp_bits = 0;
    for (int i = 0; i < 8; ++i) qp_bits |= static_cast<uint64_t>(data[pos++]) << (8 * i);
    double qp = 0.0;
    std::memcpy(&qp, &qp_bits, 8);

    const FrameGeometry geom(width, height);
    if (!(geom == reference.geometry()) || depth != reference.bit_depth()) {
        throw GeometryMismatch("reference does not match bitstream header");
    }

    const uint32_t packed_size = get_u32(data, pos);
    const uint32_t raw_size = get_u32(data, pos);
    if (pos + packed_size > data.size()) throw MalformedSequence("bitstream truncated");
    const std::vector<uint8_t> packed(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                      data.begin() + static_cast<std::ptrdiff_t>(pos + packed_size));
    pos += packed_size;
    const MotionField field = deserialize_field(zlib_inflate(packed, raw_size));
    if (field.block_size != block_size || !(field.geom == geom)) {
        throw MalformedSequence("motion field does not match header");
    }

    const HuffmanCode huffman = HuffmanCode::deserialize(data, pos);
    const uint32_t coded_size = get_u32(data, pos);
    if (pos + coded_size != data.size()) throw MalformedSequence("bad coded data length");

    BitReader reader(data.data() + pos, coded_size);
    const int tiles_x = width / 8;
    const int tiles_y = height / 8;
    std::vector<Levels8> tiles(static_cast<size_t>(tiles_x) * tiles_y);
    for (auto& tile : tiles) {
        tile = runlevel_to_levels(decode_block_symbols(huffman, reader));
    }

    const Frame prediction = compensate_frame(reference, field, threads);
    QuantConfig cfg(qp);
    return reconstruct(prediction, tiles, cfg);
}

RdCurve rd_sweep(const Frame& tmpl, const Frame& reference, EstimationMode mode, int block_size,
                 const SearchConfig& search_cfg, const IcLkConfig& iclk_cfg,
                 const RdSweepConfig& sweep) {
    const FrameEstimate estimate =
        estimate_frame(tmpl, reference, mode, block_size, search_cfg, iclk_cfg, sweep.threads);
    const MotionField qfield = quantize_field(estimate.field);
    const Frame prediction = compensate_frame(reference, qfield, sweep.threads);

    RdCurve curve;
    curve.label = std::string(mode_name(mode)) + "-bs" + std::to_string(block_size);
    for (const double qp : sweep.qp_list) {
        const EncodeResult enc = encode_frame(tmpl, prediction, qfield, QuantConfig(qp));
        curve.points.push_back(RdPoint{enc.bitstream.rate_bpp(tmpl.geometry()),
                                       ws_psnr(tmpl, enc.reconstruction)});
    }
    std::sort(curve.points.begin(), curve.points.end(),
              [](const RdPoint& a, const RdPoint& b) { return a.rate_bpp < b.rate_bpp; });
    return curve;
}

}  // namespace mpa
