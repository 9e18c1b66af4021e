#include <doctest.h>

#include <cmath>
#include <random>

#include "mpa/geometry.hpp"

using namespace mpa;

namespace {

// Independent long-double evaluation of the longitude/latitude formulas.
SpherePoint erp_to_sphere_oracle(double u, double v, const FrameGeometry& geom) {
    const long double pi = 3.14159265358979323846264338327950288L;
    const long double phi = 2.0L * pi * (static_cast<long double>(u) + 0.5L) / geom.width - pi;
    const long double theta = pi / 2.0L - pi * (static_cast<long double>(v) + 0.5L) / geom.height;
    return SpherePoint(static_cast<double>(cosl(theta) * sinl(phi)),
                       static_cast<double>(sinl(theta)),
                       static_cast<double>(cosl(theta) * cosl(phi)));
}

std::mt19937_64 test_rng(20240817);

PixelCoord random_pixel(std::mt19937_64& rng, const FrameGeometry& geom) {
    std::uniform_real_distribution<double> du(0.0, geom.width);
    std::uniform_real_distribution<double> dv(0.0, geom.height - 1.0);
    return {du(rng), dv(rng)};
}

SpherePoint random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    SpherePoint q(n(rng), n(rng), n(rng));
    while (q.norm() < 1e-3) q = SpherePoint(n(rng), n(rng), n(rng));
    return q.normalized();
}

}  // namespace

TEST_CASE("erp_to_sphere maps the frame center to the front axis") {
    const FrameGeometry geom(768, 384);
    const SpherePoint q = erp_to_sphere({383.5, 191.5}, geom);
    CHECK(q.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.z() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("erp_to_sphere maps the quarter-width column to -x") {
    const FrameGeometry geom(768, 384);
    const SpherePoint q = erp_to_sphere({191.5, 191.5}, geom);
    CHECK(q.x() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(q.y()) < 1e-12);
    CHECK(std::abs(q.z()) < 1e-12);
}

TEST_CASE("erp_to_sphere matches the high-precision formula evaluation") {
    const FrameGeometry geom(768, 384);
    const SpherePoint q = erp_to_sphere({100.0, 50.0}, geom);
    // frozen from an independent evaluation of the phi/theta formulas
    CHECK(q.x() == doctest::Approx(-0.29415941043972619233).epsilon(1e-13));
    CHECK(q.y() == doctest::Approx(0.91585978866739986979).epsilon(1e-13));
    CHECK(q.z() == doctest::Approx(-0.27326011189315273763).epsilon(1e-13));

    auto rng = test_rng;
    for (int i = 0; i < 200; ++i) {
        const PixelCoord px = random_pixel(rng, geom);
        const SpherePoint expect = erp_to_sphere_oracle(px.u, px.v, geom);
        CHECK((erp_to_sphere(px, geom) - expect).norm() < 1e-14);
    }
}

TEST_CASE("erp_to_sphere output is unit norm") {
    const FrameGeometry geom(768, 384);
    auto rng = test_rng;
    for (int i = 0; i < 1000; ++i) {
        const PixelCoord px = random_pixel(rng, geom);
        CHECK(std::abs(erp_to_sphere(px, geom).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("horizontal wrap is exact") {
    const FrameGeometry geom(768, 384);
    auto rng = test_rng;
    for (int i = 0; i < 200; ++i) {
        const PixelCoord px = random_pixel(rng, geom);
        const SpherePoint a = erp_to_sphere(px, geom);
        const SpherePoint b = erp_to_sphere({px.u + geom.width, px.v}, geom);
        CHECK(a.x() == b.x());
        CHECK(a.y() == b.y());
        CHECK(a.z() == b.z());
    }
}

TEST_CASE("sphere_to_erp inverts the center case and handles the pole") {
    const FrameGeometry geom(768, 384);
    const PixelCoord center = sphere_to_erp(SpherePoint(0, 0, 1), geom);
    CHECK(center.u == doctest::Approx(383.5).epsilon(1e-12));
    CHECK(center.v == doctest::Approx(191.5).epsilon(1e-12));

    const PixelCoord pole = sphere_to_erp(SpherePoint(0, 1, 0), geom);
    CHECK(pole.u == doctest::Approx(383.5).epsilon(1e-12));
    CHECK(pole.v == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("erp/sphere round trip under 1e-9 px") {
    const FrameGeometry geom(768, 384);
    auto rng = test_rng;
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const PixelCoord px = random_pixel(rng, geom);
        const PixelCoord back = sphere_to_erp(erp_to_sphere(px, geom), geom);
        max_err = std::max({max_err, std::abs(back.u - px.u), std::abs(back.v - px.v)});
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("plane rotations are the canonical 90 degree turns") {
    const MotionPlane fb = plane_rotation(PlaneId::FrontBack);
    CHECK(fb.rotation.isApprox(Eigen::Matrix3d::Identity(), 0.0));

    const MotionPlane lr = plane_rotation(PlaneId::LeftRight);
    CHECK((lr.rotation * SpherePoint(1, 0, 0) - SpherePoint(0, 0, 1)).norm() == 0.0);

    const MotionPlane tb = plane_rotation(PlaneId::TopBottom);
    CHECK((tb.rotation * SpherePoint(0, 1, 0) - SpherePoint(0, 0, 1)).norm() == 0.0);

    for (PlaneId id : {PlaneId::FrontBack, PlaneId::LeftRight, PlaneId::TopBottom}) {
        const Eigen::Matrix3d r = plane_rotation(id).rotation;
        CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sphere_to_plane basics") {
    const MotionPlane fb = plane_rotation(PlaneId::FrontBack);

    const PlanePoint origin = sphere_to_plane(SpherePoint(0, 0, 1), fb);
    CHECK(origin.x == 0.0);
    CHECK(origin.y == 0.0);
    CHECK(origin.hemisphere == +1);

    const double s = 1.0 / std::sqrt(2.0);
    const PlanePoint diag = sphere_to_plane(SpherePoint(s, 0, s), fb);
    CHECK(diag.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(diag.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(diag.hemisphere == +1);

    const PlanePoint antipode = sphere_to_plane(SpherePoint(0, 0, -1), fb);
    CHECK(antipode.x == 0.0);
    CHECK(antipode.y == 0.0);
    CHECK(antipode.hemisphere == -1);

    CHECK_THROWS_AS(sphere_to_plane(SpherePoint(1, 0, 0), fb), NearPlaneSingularity);
}

TEST_CASE("plane_to_sphere inverts sphere_to_plane") {
    const MotionPlane fb = plane_rotation(PlaneId::FrontBack);
    CHECK((plane_to_sphere({0, 0, +1}, fb) - SpherePoint(0, 0, 1)).norm() < 1e-15);

    const double s = 1.0 / std::sqrt(2.0);
    CHECK((plane_to_sphere({1, 0, +1}, fb) - SpherePoint(s, 0, s)).norm() < 1e-15);

    auto rng = test_rng;
    double max_err = 0.0;
    for (PlaneId id : {PlaneId::FrontBack, PlaneId::LeftRight, PlaneId::TopBottom}) {
        const MotionPlane plane = plane_rotation(id);
        int done = 0;
        while (done < 1000) {
            const SpherePoint q = random_unit(rng);
            if (std::abs((plane.rotation * q).z()) <= 0.05) continue;
            ++done;
            const SpherePoint back = plane_to_sphere(sphere_to_plane(q, plane), plane);
            // angular error
            max_err = std::max(max_err, std::acos(std::clamp(back.dot(q), -1.0, 1.0)));
        }
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("zeta of the frame center is the plane origin") {
    const FrameGeometry geom(768, 384);
    const MotionPlane fb = plane_rotation(PlaneId::FrontBack);
    const PlanePoint pt = zeta({383.5, 191.5}, fb, geom);
    CHECK(std::abs(pt.x) < 1e-12);
    CHECK(std::abs(pt.y) < 1e-12);
    CHECK(pt.hemisphere == +1);
}

TEST_CASE("zeta matches the frozen composition value on the top-bottom plane") {
    const FrameGeometry geom(768, 384);
    const MotionPlane tb = plane_rotation(PlaneId::TopBottom);
    const PlanePoint pt = zeta({100.0, 50.0}, tb, geom);
    // frozen from composing the two reference mappings independently
    CHECK(pt.x == doctest::Approx(-0.32118389089637387308).epsilon(1e-12));
    CHECK(pt.y == doctest::Approx(0.29836456985490475815).epsilon(1e-12));
    CHECK(pt.hemisphere == +1);

    const PixelCoord back = zeta_inv(pt, tb, geom);
    CHECK(back.u == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(back.v == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("zeta / zeta_inv round trip under 1e-6 px") {
    const FrameGeometry geom(768, 384);
    auto rng = test_rng;
    double max_err = 0.0;
    for (PlaneId id : {PlaneId::FrontBack, PlaneId::LeftRight, PlaneId::TopBottom}) {
        const MotionPlane plane = plane_rotation(id);
        int done = 0;
        while (done < 1000) {
            const PixelCoord px = random_pixel(rng, geom);
            const SpherePoint q = erp_to_sphere(px, geom);
            if (std::abs((plane.rotation * q).z()) <= kPlaneEpsilon) continue;
            ++done;
            const PixelCoord back = zeta_inv(zeta(px, plane, geom), plane, geom);
            max_err = std::max({max_err, std::abs(back.u - px.u), std::abs(back.v - px.v)});
        }
    }
    CHECK(max_err < 1e-6);
}

TEST_CASE("zeta_jacobian agrees with central differences") {
    const FrameGeometry geom(768, 384);
    auto rng = test_rng;

    auto finite_difference = [&](const PlanePoint& pt, const MotionPlane& plane) {
        const double h = 1e-4;
        Eigen::Matrix2d jac;
        const PixelCoord xp = zeta_inv({pt.x + h, pt.y, pt.hemisphere}, plane, geom);
        const PixelCoord xm = zeta_inv({pt.x - h, pt.y, pt.hemisphere}, plane, geom);
        const PixelCoord yp = zeta_inv({pt.x, pt.y + h, pt.hemisphere}, plane, geom);
        const PixelCoord ym = zeta_inv({pt.x, pt.y - h, pt.hemisphere}, plane, geom);
        auto wrap_delta = [&](double d) {
            // central difference across the seam needs unwrapping
            if (d > geom.width / 2.0) d -= geom.width;
            if (d < -geom.width / 2.0) d += geom.width;
            return d;
        };
        jac(0, 0) = wrap_delta(xp.u - xm.u) / (2 * h);
        jac(0, 1) = wrap_delta(yp.u - ym.u) / (2 * h);
        jac(1, 0) = (xp.v - xm.v) / (2 * h);
        jac(1, 1) = (yp.v - ym.v) / (2 * h);
        return jac;
    };

    const MotionPlane fb = plane_rotation(PlaneId::FrontBack);
    const Eigen::Matrix2d at_origin = zeta_jacobian({0, 0, +1}, fb, geom);
    CHECK((at_origin - finite_difference({0, 0, +1}, fb)).norm() / at_origin.norm() < 1e-4);

    const Eigen::Matrix2d at_half = zeta_jacobian({0.5, 0.5, +1}, fb, geom);
    CHECK((at_half - finite_difference({0.5, 0.5, +1}, fb)).norm() / at_half.norm() < 1e-4);

    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_int_distribution<int> plane_pick(0, 2);
    std::uniform_int_distribution<int> hem_pick(0, 1);
    int done = 0;
    while (done < 100) {
        const MotionPlane plane = plane_rotation(static_cast<PlaneId>(plane_pick(rng)));
        const PlanePoint pt{coord(rng), coord(rng), hem_pick(rng) ? +1 : -1};
        // keep clear of the polar coordinate singularity (plane origin of the
        // top/bottom plane maps to a pole)
        if (pt.x * pt.x + pt.y * pt.y < 0.04) continue;
        ++done;
        const Eigen::Matrix2d jac = zeta_jacobian(pt, plane, geom);
        const Eigen::Matrix2d fd = finite_difference(pt, plane);
        CHECK((jac - fd).norm() / jac.norm() < 1e-4);
        CHECK(jac.determinant() != 0.0);
    }
}

TEST_CASE("geometry guards") {
    CHECK_THROWS_AS(FrameGeometry(100, 60), GeometryMismatch);
    const FrameGeometry geom(768, 384);
    const MotionPlane fb = plane_rotation(PlaneId::FrontBack);
    CHECK_THROWS_AS(zeta_jacobian({25.0, 25.0, +1}, fb, geom), NearPlaneSingularity);
}
