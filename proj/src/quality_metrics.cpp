#include "mpa/quality_metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mpa {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_comparable(const Frame& a, const Frame& b) {
    if (!a.same_raster(b)) {
        throw GeometryMismatch("frames differ in geometry or bit depth");
    }
}

double to_db(double max_value, double mse) {
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / mse);
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
    check_comparable(a, b);
    double acc = 0.0;
    const auto& sa = a.samples();
    const auto& sb = b.samples();
    for (size_t i = 0; i < sa.size(); ++i) {
        const double d = static_cast<double>(sa[i]) - static_cast<double>(sb[i]);
        acc += d * d;
    }
    return to_db(a.max_value(), acc / static_cast<double>(sa.size()));
}

std::vector<double> ws_weights(const FrameGeometry& geom) {
    std::vector<double> w(static_cast<size_t>(geom.height));
    const int h = geom.height;
    for (int v = 0; v < h / 2; ++v) {
        w[static_cast<size_t>(v)] = std::cos((v + 0.5 - h / 2.0) * kPi / h);
        w[static_cast<size_t>(h - 1 - v)] = w[static_cast<size_t>(v)];
    }
    return w;
}

double ws_psnr(const Frame& a, const Frame& b) {
    check_comparable(a, b);
    const std::vector<double> w = ws_weights(a.geometry());
    double num = 0.0;
    double den = 0.0;
    for (int v = 0; v < a.height(); ++v) {
        double row = 0.0;
        for (int u = 0; u < a.width(); ++u) {
            const double d = static_cast<double>(a.at(v, u)) - static_cast<double>(b.at(v, u));
            row += d * d;
        }
        num += w[static_cast<size_t>(v)] * row;
        den += w[static_cast<size_t>(v)] * a.width();
    }
    return to_db(a.max_value(), num / den);
}

void RdCurve::validate() const {
    if (points.size() < 4) throw std::invalid_argument("rd curve needs at least 4 points");
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].rate_bpp > 0.0) || !std::isfinite(points[i].quality_db)) {
            throw std::invalid_argument("rd point must have positive rate and finite quality");
        }
        if (i > 0 && points[i].rate_bpp <= points[i - 1].rate_bpp) {
            throw std::invalid_argument("rd curve rates must increase strictly");
        }
    }
}

namespace {

// Least-squares cubic of ln(rate) over quality; interpolating for 4 points.
Eigen::Vector4d fit_log_rate(const RdCurve& curve, double q_shift) {
    const auto n = static_cast<Eigen::Index>(curve.points.size());
    Eigen::MatrixXd vand(n, 4);
    Eigen::VectorXd log_rate(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double q = curve.points[static_cast<size_t>(i)].quality_db - q_shift;
        vand(i, 0) = 1.0;
        vand(i, 1) = q;
        vand(i, 2) = q * q;
        vand(i, 3) = q * q * q;
        log_rate(i) = std::log(curve.points[static_cast<size_t>(i)].rate_bpp);
    }
    return vand.colPivHouseholderQr().solve(log_rate);
}

double integrate_cubic(const Eigen::Vector4d& c, double lo, double hi) {
    auto antiderivative = [&](double x) {
        return c[0] * x + c[1] * x * x / 2.0 + c[2] * x * x * x / 3.0 + c[3] * x * x * x * x / 4.0;
    };
    return antiderivative(hi) - antiderivative(lo);
}

}  // namespace

double bd_rate(const RdCurve& anchor, const RdCurve& test) {
    anchor.validate();
    test.validate();

    auto quality_range = [](const RdCurve& c) {
        double lo = c.points.front().quality_db;
        double hi = lo;
        for (const RdPoint& p : c.points) {
            lo = std::min(lo, p.quality_db);
            hi = std::max(hi, p.quality_db);
        }
        return std::pair<double, double>(lo, hi);
    };
    const auto [alo, ahi] = quality_range(anchor);
    const auto [tlo, thi] = quality_range(test);
    const double lo = std::max(alo, tlo);
    const double hi = std::min(ahi, thi);
    if (!(hi > lo)) {
        throw NoOverlap("rd curves have disjoint quality ranges");
    }

    const double shift = 0.5 * (lo + hi);
    const Eigen::Vector4d ca = fit_log_rate(anchor, shift);
    const Eigen::Vector4d ct = fit_log_rate(test, shift);
    const double avg_log_ratio =
        (integrate_cubic(ct, lo - shift, hi - shift) - integrate_cubic(ca, lo - shift, hi - shift)) /
        (hi - lo);
    return (std::exp(avg_log_ratio) - 1.0) * 100.0;
}

void write_rd_csv(const std::vector<RdCurve>& curves, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for write: " + path.string());
    out << "label,rate_bpp,ws_psnr_db\n";
    out.precision(12);
    for (const RdCurve& curve : curves) {
        for (const RdPoint& p : curve.points) {
            out << curve.label << ',' << p.rate_bpp << ',' << p.quality_db << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<RdCurve> read_rd_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "label,rate_bpp,ws_psnr_db") {
        throw MalformedSequence("bad rd csv header");
    }
    std::vector<RdCurve> curves;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string label, rate, quality;
        if (!std::getline(row, label, ',') || !std::getline(row, rate, ',') ||
            !std::getline(row, quality)) {
            throw MalformedSequence("bad rd csv row: " + line);
        }
        if (curves.empty() || curves.back().label != label) {
            curves.push_back(RdCurve{label, {}});
        }
        curves.back().points.push_back(RdPoint{std::stod(rate), std::stod(quality)});
    }
    return curves;
}

}  // namespace mpa
