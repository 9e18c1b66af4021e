#include "mpa/video_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mpa {

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
    std::filesystem::path p = data_path;
    p += ".meta";
    return p;
}

}  // namespace

size_t SequenceSource::luma_bytes() const {
    const size_t samples = static_cast<size_t>(geom.width) * geom.height;
    return bit_depth > 8 ? samples * 2 : samples;
}

size_t SequenceSource::frame_bytes() const {
    const size_t luma = luma_bytes();
    return chroma == ChromaLayout::Planar420 ? luma + luma / 2 : luma;
}

SequenceSource open_sequence(const std::filesystem::path& data_path) {
    std::ifstream meta(sidecar_path(data_path));
    if (!meta) throw IoError("missing sidecar: " + sidecar_path(data_path).string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(meta, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw MalformedSequence("bad sidecar line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    SequenceSource src;
    src.path = data_path;
    try {
        src.geom = FrameGeometry(std::stoi(kv.at("width")), std::stoi(kv.at("height")));
        src.bit_depth = std::stoi(kv.at("depth"));
        const std::string chroma = kv.count("chroma") ? kv.at("chroma") : "y";
        src.chroma = chroma == "420" ? ChromaLayout::Planar420 : ChromaLayout::LumaOnly;
        src.fps = kv.count("fps") ? std::stod(kv.at("fps")) : 30.0;
    } catch (const std::out_of_range&) {
        throw MalformedSequence("sidecar missing width/height/depth");
    }
    if (src.bit_depth != 8 && src.bit_depth != 10) {
        throw MalformedSequence("sidecar depth must be 8 or 10");
    }

    std::error_code ec;
    const auto size = std::filesystem::file_size(data_path, ec);
    if (ec) throw IoError("cannot stat: " + data_path.string());
    if (size % src.frame_bytes() != 0) {
        throw TruncatedFile("file size is not a whole number of frames: " + data_path.string());
    }
    src.frame_count = static_cast<int>(size / src.frame_bytes());
    return src;
}

void write_sidecar(const SequenceSource& src) {
    std::ofstream out(sidecar_path(src.path));
    if (!out) throw IoError("cannot write sidecar for: " + src.path.string());
    out << "width=" << src.geom.width << "\n"
        << "height=" << src.geom.height << "\n"
        << "depth=" << src.bit_depth << "\n"
        << "chroma=" << (src.chroma == ChromaLayout::Planar420 ? "420" : "y") << "\n"
        << "fps=" << src.fps << "\n";
    if (!out) throw IoError("sidecar write failed for: " + src.path.string());
}

Frame read_luma(const SequenceSource& src, int index) {
    if (index < 0 || index >= src.frame_count) {
        throw IndexOutOfRange("frame index " + std::to_string(index) + " out of range");
    }
    std::ifstream in(src.path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + src.path.string());
    in.seekg(static_cast<std::streamoff>(src.frame_bytes() * static_cast<size_t>(index)));

    const size_t samples = static_cast<size_t>(src.geom.width) * src.geom.height;
    std::vector<uint16_t> data(samples);
    if (src.bit_depth > 8) {
        // 10-bit stored little endian, LSB aligned in 16 bits.
        std::vector<uint8_t> raw(samples * 2);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
            throw TruncatedFile("short read: " + src.path.string());
        }
        for (size_t i = 0; i < samples; ++i) {
            data[i] = static_cast<uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
        }
    } else {
        std::vector<uint8_t> raw(samples);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
            throw TruncatedFile("short read: " + src.path.string());
        }
        for (size_t i = 0; i < samples; ++i) data[i] = raw[i];
    }
    return Frame(src.geom, src.bit_depth, std::move(data));
}

void append_luma(const SequenceSource& src, const Frame& frame) {
    if (!(frame.geometry() == src.geom) || frame.bit_depth() != src.bit_depth) {
        throw GeometryMismatch("frame does not match sequence metadata");
    }
    std::ofstream out(src.path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open for append: " + src.path.string());
    if (src.bit_depth > 8) {
        std::vector<uint8_t> raw(frame.samples().size() * 2);
        for (size_t i = 0; i < frame.samples().size(); ++i) {
            raw[2 * i] = static_cast<uint8_t>(frame.samples()[i] & 0xff);
            raw[2 * i + 1] = static_cast<uint8_t>(frame.samples()[i] >> 8);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    } else {
        std::vector<uint8_t> raw(frame.samples().size());
        for (size_t i = 0; i < frame.samples().size(); ++i) {
            raw[i] = static_cast<uint8_t>(frame.samples()[i]);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    if (!out) throw IoError("append failed: " + src.path.string());
    if (src.chroma == ChromaLayout::Planar420) {
        // Neutral chroma planes keep 4:2:0 files playable.
        const uint16_t mid = static_cast<uint16_t>(1u << (src.bit_depth - 1));
        const size_t chroma_samples = static_cast<size_t>(src.geom.width / 2) * (src.geom.height / 2) * 2;
        if (src.bit_depth > 8) {
            std::vector<uint8_t> raw(chroma_samples * 2);
            for (size_t i = 0; i < chroma_samples; ++i) {
                raw[2 * i] = static_cast<uint8_t>(mid & 0xff);
                raw[2 * i + 1] = static_cast<uint8_t>(mid >> 8);
            }
            out.write(reinterpret_cast<const char*>(raw.data()),
                      static_cast<std::streamsize>(raw.size()));
        } else {
            std::vector<uint8_t> raw(chroma_samples, static_cast<uint8_t>(mid));
            out.write(reinterpret_cast<const char*>(raw.data()),
                      static_cast<std::streamsize>(raw.size()));
        }
    }
}

Frame downscale(const Frame& frame, const FrameGeometry& target) {
    const FrameGeometry src = frame.geometry();
    if (target.width > src.width || target.height > src.height) {
        throw BadTargetGeometry("downscale target larger than source");
    }
    // Area average over the exact source footprint of each target pixel.
    const double sx = static_cast<double>(src.width) / target.width;
    const double sy = static_cast<double>(src.height) / target.height;
    Frame out(target, frame.bit_depth());
    for (int r = 0; r < target.height; ++r) {
        const double y0 = r * sy;
        const double y1 = (r + 1) * sy;
        for (int c = 0; c < target.width; ++c) {
            const double x0 = c * sx;
            const double x1 = (c + 1) * sx;
            double acc = 0.0;
            for (int row = static_cast<int>(std::floor(y0)); row < static_cast<int>(std::ceil(y1));
                 ++row) {
                const double hy = std::min<double>(y1, row + 1) - std::max<double>(y0, row);
                if (hy <= 0.0) continue;
                for (int col = static_cast<int>(std::floor(x0));
                     col < static_cast<int>(std::ceil(x1)); ++col) {
                    const double wx = std::min<double>(x1, col + 1) - std::max<double>(x0, col);
                    if (wx <= 0.0) continue;
                    acc += hy * wx * frame.at(std::min(row, src.height - 1), std::min(col, src.width - 1));
                }
            }
            out.at(r, c) = static_cast<uint16_t>(std::lround(acc / (sx * sy)));
        }
    }
    return out;
}

FramePairPlan plan_pairs(int count_total, int pairs) {
    if (count_total < pairs + 1) {
        throw TooFewFrames("need at least pairs+1 frames, got " + std::to_string(count_total));
    }
    FramePairPlan plan;
    plan.pairs.reserve(static_cast<size_t>(pairs));
    for (int i = 0; i < pairs; ++i) {
        int tmpl;
        if (pairs == 1) {
            tmpl = (count_total - 1 + 1) / 2;
        } else {
            tmpl = 1 + static_cast<int>(std::lround(
                           static_cast<double>(i) * (count_total - 2) / (pairs - 1)));
        }
        plan.pairs.emplace_back(tmpl, tmpl - 1);
    }
    return plan;
}

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path.string());
    out << "P5\n" << frame.width() << ' ' << frame.height() << '\n' << frame.max_value() << '\n';
    if (frame.bit_depth() > 8) {
        // 16-bit big endian per the PGM convention
        for (uint16_t s : frame.samples()) {
            out.put(static_cast<char>(s >> 8));
            out.put(static_cast<char>(s & 0xff));
        }
    } else {
        for (uint16_t s : frame.samples()) out.put(static_cast<char>(s));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Frame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string magic;
    int width = 0, height = 0, maxval = 0;
    in >> magic >> width >> height >> maxval;
    if (magic != "P5" || width <= 0 || height <= 0) throw MalformedSequence("bad pgm header");
    in.get();  // single whitespace after maxval
    const int depth = maxval > 255 ? 10 : 8;
    std::vector<uint16_t> data(static_cast<size_t>(width) * height);
    if (depth > 8) {
        for (auto& s : data) {
            const int hi = in.get();
            const int lo = in.get();
            if (lo == EOF) throw TruncatedFile("pgm truncated");
            s = static_cast<uint16_t>((hi << 8) | lo);
        }
    } else {
        for (auto& s : data) {
            const int b = in.get();
            if (b == EOF) throw TruncatedFile("pgm truncated");
            s = static_cast<uint16_t>(b);
        }
    }
    return Frame(FrameGeometry(width, height), depth, std::move(data));
}

}  // namespace mpa
