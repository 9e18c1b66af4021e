#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mpa/quality_metrics.hpp"

using namespace mpa;

namespace {

Frame constant_frame(const FrameGeometry& geom, uint16_t value, int depth = 8) {
    return Frame(geom, depth, value);
}

RdCurve make_curve(const std::string& label, std::vector<RdPoint> pts) {
    RdCurve c;
    c.label = label;
    c.points = std::move(pts);
    return c;
}

}  // namespace

TEST_CASE("psnr closed forms") {
    const FrameGeometry geom(64, 32);
    const Frame a = constant_frame(geom, 100);

    CHECK(std::isinf(psnr(a, a)));

    const Frame b = constant_frame(geom, 101);
    CHECK(psnr(a, b) == doctest::Approx(48.1308036087).epsilon(1e-9));
    CHECK(psnr(a, b) == psnr(b, a));

    Frame c(FrameGeometry(128, 64), 8, static_cast<uint16_t>(100));
    CHECK_THROWS_AS(psnr(a, c), GeometryMismatch);
}

TEST_CASE("ws_psnr equals psnr for uniform differences") {
    const FrameGeometry geom(768, 384);
    const Frame a = constant_frame(geom, 80);
    CHECK(std::isinf(ws_psnr(a, a)));

    const Frame b = constant_frame(geom, 82);
    CHECK(ws_psnr(a, b) == doctest::Approx(42.1102036954).epsilon(1e-9));
    CHECK(ws_psnr(a, b) == doctest::Approx(psnr(a, b)).epsilon(1e-12));
}

TEST_CASE("ws weights are exactly symmetric and penalize the poles") {
    const FrameGeometry geom(768, 384);
    const std::vector<double> w = ws_weights(geom);
    for (int v = 0; v < geom.height; ++v) {
        CHECK(w[static_cast<size_t>(v)] == w[static_cast<size_t>(geom.height - 1 - v)]);
    }

    // identical error in the top row scores higher than in an equator row
    Frame a = constant_frame(geom, 100);
    Frame top = a;
    Frame middle = a;
    for (int c = 0; c < geom.width; ++c) {
        top.at(0, c) = 110;
        middle.at(geom.height / 2, c) = 110;
    }
    CHECK(ws_psnr(a, top) > ws_psnr(a, middle));
    CHECK(psnr(a, top) == doctest::Approx(psnr(a, middle)).epsilon(1e-12));
}

TEST_CASE("ws_psnr equals psnr when squared error is constant per row") {
    const FrameGeometry geom(64, 32);
    Frame a = constant_frame(geom, 90);
    Frame b = a;
    // alternate +3/-3 within each row: same squared error everywhere
    for (int r = 0; r < geom.height; ++r) {
        for (int c = 0; c < geom.width; ++c) {
            b.at(r, c) = static_cast<uint16_t>(90 + ((c % 2) ? 3 : -3));
        }
    }
    CHECK(ws_psnr(a, b) == doctest::Approx(psnr(a, b)).epsilon(1e-12));
}

TEST_CASE("rd curve validation") {
    RdCurve c = make_curve("x", {{0.1, 30}, {0.2, 33}, {0.4, 36}});
    CHECK_THROWS(c.validate());
    c.points.push_back({0.8, 39});
    CHECK_NOTHROW(c.validate());
    c.points.push_back({0.8, 40});  // not strictly increasing
    CHECK_THROWS(c.validate());
}

TEST_CASE("bd_rate identities") {
    const RdCurve anchor =
        make_curve("anchor", {{0.1, 30.0}, {0.2, 33.0}, {0.4, 36.0}, {0.8, 39.0}});
    CHECK(bd_rate(anchor, anchor) == doctest::Approx(0.0).epsilon(1e-12));

    RdCurve scaled = anchor;
    for (RdPoint& p : scaled.points) p.rate_bpp *= 1.10;
    CHECK(bd_rate(anchor, scaled) == doctest::Approx(10.0).epsilon(1e-9));

    const RdCurve disjoint =
        make_curve("d", {{0.1, 50.0}, {0.2, 53.0}, {0.4, 56.0}, {0.8, 59.0}});
    CHECK_THROWS_AS(bd_rate(anchor, disjoint), NoOverlap);
}

TEST_CASE("bd_rate agrees with a dense trapezoidal integration oracle") {
    const RdCurve anchor =
        make_curve("anchor", {{0.12, 31.0}, {0.27, 34.2}, {0.55, 37.1}, {1.1, 40.3}});
    const RdCurve test =
        make_curve("test", {{0.10, 31.5}, {0.22, 34.6}, {0.46, 37.6}, {0.9, 40.6}});

    // Independent path: interpolating cubic through the 4 points solved with
    // partial-pivот LU on the raw Vandermonde, then trapezoid integration at
    // 10x density.
    auto fit = [](const RdCurve& c) {
        Eigen::Matrix4d vand;
        Eigen::Vector4d rhs;
        for (int i = 0; i < 4; ++i) {
            const double q = c.points[static_cast<size_t>(i)].quality_db;
            vand(i, 0) = 1.0;
            vand(i, 1) = q;
            vand(i, 2) = q * q;
            vand(i, 3) = q * q * q;
            rhs(i) = std::log(c.points[static_cast<size_t>(i)].rate_bpp);
        }
        return Eigen::Vector4d(vand.partialPivLu().solve(rhs));
    };
    const Eigen::Vector4d ca = fit(anchor);
    const Eigen::Vector4d ct = fit(test);
    const double lo = std::max(anchor.points.front().quality_db, test.points.front().quality_db);
    const double hi = std::min(anchor.points.back().quality_db, test.points.back().quality_db);

    const int steps = 4000;  // ~10x denser than any sensible closed-form grid
    double acc = 0.0;
    auto eval = [](const Eigen::Vector4d& c, double q) {
        return c[0] + c[1] * q + c[2] * q * q + c[3] * q * q * q;
    };
    for (int i = 0; i < steps; ++i) {
        const double q0 = lo + (hi - lo) * i / steps;
        const double q1 = lo + (hi - lo) * (i + 1) / steps;
        const double d0 = eval(ct, q0) - eval(ca, q0);
        const double d1 = eval(ct, q1) - eval(ca, q1);
        acc += 0.5 * (d0 + d1) * (q1 - q0);
    }
    const double oracle = (std::exp(acc / (hi - lo)) - 1.0) * 100.0;

    CHECK(bd_rate(anchor, test) == doctest::Approx(oracle).epsilon(0.0).scale(1.0));
    CHECK(std::abs(bd_rate(anchor, test) - oracle) < 0.1);
}

TEST_CASE("bd_rate reciprocity on smooth curves") {
    const RdCurve anchor =
        make_curve("anchor", {{0.12, 31.0}, {0.27, 34.2}, {0.55, 37.1}, {1.1, 40.3}});
    const RdCurve test =
        make_curve("test", {{0.10, 31.2}, {0.23, 34.4}, {0.48, 37.3}, {0.95, 40.5}});
    const double fwd = bd_rate(anchor, test);
    const double rev = bd_rate(test, anchor);
    CHECK(std::abs(fwd + rev / (1.0 + rev / 100.0)) < 0.2);
}

TEST_CASE("rd csv round trip") {
    const auto path = std::filesystem::temp_directory_path() / "mpa360_rd_test.csv";
    std::vector<RdCurve> curves{
        make_curve("a", {{0.1, 30.0}, {0.2, 33.0}, {0.4, 36.0}, {0.8, 39.0}}),
        make_curve("b", {{0.15, 31.0}, {0.25, 34.0}, {0.5, 37.0}, {0.9, 40.0}}),
    };
    write_rd_csv(curves, path);
    const auto parsed = read_rd_csv(path);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].label == "a");
    CHECK(parsed[1].label == "b");
    for (size_t i = 0; i < 2; ++i) {
        REQUIRE(parsed[i].points.size() == curves[i].points.size());
        for (size_t k = 0; k < parsed[i].points.size(); ++k) {
            CHECK(parsed[i].points[k].rate_bpp ==
                  doctest::Approx(curves[i].points[k].rate_bpp).epsilon(1e-9));
            CHECK(parsed[i].points[k].quality_db ==
                  doctest::Approx(curves[i].points[k].quality_db).epsilon(1e-9));
        }
    }
    std::filesystem::remove(path);
}
