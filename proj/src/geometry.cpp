#include "mpa/geometry.hpp"

#include <cmath>

namespace mpa {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

PixelCoord wrap_pixel(PixelCoord px, const FrameGeometry& geom) {
    const double w = static_cast<double>(geom.width);
    double u = std::fmod(px.u, w);
    if (u < 0.0) u += w;
    double v = px.v;
    if (v < 0.0) v = 0.0;
    const double h = static_cast<double>(geom.height);
    if (v > h) v = h;
    return {u, v};
}

SpherePoint erp_to_sphere(PixelCoord px, const FrameGeometry& geom) {
    px = wrap_pixel(px, geom);
    const double phi = kTwoPi * (px.u + 0.5) / geom.width - kPi;
    const double theta = kPi / 2.0 - kPi * (px.v + 0.5) / geom.height;
    const double ct = std::cos(theta);
    return {ct * std::sin(phi), std::sin(theta), ct * std::cos(phi)};
}

PixelCoord sphere_to_erp(const SpherePoint& q, const FrameGeometry& geom) {
    // atan2(0,0) = 0 resolves the poles to the frame's center column.
    const double phi = std::atan2(q.x(), q.z());
    const double theta = std::asin(std::clamp(q.y(), -1.0, 1.0));
    const double u = (phi + kPi) * geom.width / kTwoPi - 0.5;
    const double v = (kPi / 2.0 - theta) * geom.height / kPi - 0.5;
    return {u, v};
}

MotionPlane plane_rotation(PlaneId id) {
    MotionPlane plane;
    plane.id = id;
    switch (id) {
        case PlaneId::FrontBack:
            plane.rotation = Eigen::Matrix3d::Identity();
            break;
        case PlaneId::LeftRight:
            // 90 degree yaw: (1,0,0) -> (0,0,1)
            plane.rotation << 0, 0, -1,
                              0, 1,  0,
                              1, 0,  0;
            break;
        case PlaneId::TopBottom:
            // 90 degree pitch: (0,1,0) -> (0,0,1)
            plane.rotation << 1, 0,  0,
                              0, 0, -1,
                              0, 1,  0;
            break;
        case PlaneId::ErpDirect:
            throw GeometryMismatch("ErpDirect has no motion plane rotation");
    }
    return plane;
}

PlanePoint sphere_to_plane(const SpherePoint& q, const MotionPlane& plane) {
    const Eigen::Vector3d r = plane.rotation * q;
    if (std::abs(r.z()) < kPlaneEpsilon) {
        throw NearPlaneSingularity("point within epsilon of the plane boundary, |z| = " +
                                   std::to_string(std::abs(r.z())));
    }
    return {r.x() / r.z(), r.y() / r.z(), r.z() > 0.0 ? +1 : -1};
}

SpherePoint plane_to_sphere(const PlanePoint& pt, const MotionPlane& plane) {
    Eigen::Vector3d r(pt.x, pt.y, 1.0);
    r *= static_cast<double>(pt.hemisphere) / r.norm();
    return plane.rotation.transpose() * r;
}

PlanePoint zeta(PixelCoord px, const MotionPlane& plane, const FrameGeometry& geom) {
    return sphere_to_plane(erp_to_sphere(px, geom), plane);
}

PixelCoord zeta_inv(const PlanePoint& pt, const MotionPlane& plane, const FrameGeometry& geom) {
    return sphere_to_erp(plane_to_sphere(pt, plane), geom);
}

Eigen::Matrix2d zeta_jacobian(const PlanePoint& pt, const MotionPlane& plane,
                              const FrameGeometry& geom) {
    const double s2 = pt.x * pt.x + pt.y * pt.y + 1.0;
    if (s2 > 1.0 / (kPlaneEpsilon * kPlaneEpsilon)) {
        throw NearPlaneSingularity("plane point outside the invertible region");
    }
    const double s = std::sqrt(s2);
    const double hem = static_cast<double>(pt.hemisphere);

    // q = R^T * hem * (x, y, 1) / s; columns are dq/dx and dq/dy.
    const Eigen::Vector3d w(pt.x, pt.y, 1.0);
    const Eigen::Vector3d dn_dx = Eigen::Vector3d::UnitX() / s - w * (pt.x / (s2 * s));
    const Eigen::Vector3d dn_dy = Eigen::Vector3d::UnitY() / s - w * (pt.y / (s2 * s));
    const Eigen::Matrix3d rt = plane.rotation.transpose();
    const Eigen::Vector3d q = rt * (hem * w / s);
    const Eigen::Vector3d dq_dx = rt * (hem * dn_dx);
    const Eigen::Vector3d dq_dy = rt * (hem * dn_dy);

    // phi = atan2(q_x, q_z), theta = asin(q_y)
    const double rxz2 = q.x() * q.x() + q.z() * q.z();
    const Eigen::Vector3d dphi_dq(q.z() / rxz2, 0.0, -q.x() / rxz2);
    const double dtheta_dqy = 1.0 / std::sqrt(std::max(1.0 - q.y() * q.y(), 1e-300));

    const double ku = geom.width / kTwoPi;
    const double kv = -geom.height / kPi;

    Eigen::Matrix2d jac;
    jac(0, 0) = ku * dphi_dq.dot(dq_dx);
    jac(0, 1) = ku * dphi_dq.dot(dq_dy);
    jac(1, 0) = kv * dtheta_dqy * dq_dx.y();
    jac(1, 1) = kv * dtheta_dqy * dq_dy.y();
    return jac;
}

}  // namespace mpa
