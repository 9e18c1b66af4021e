#pragma once

#include <Eigen/Core>

#include "mpa/errors.hpp"

namespace mpa {

// Rotated-z threshold below which plane coordinates are rejected. Bounds
// |X|,|Y| to about 20 and keeps the plane Jacobian well conditioned.
inline constexpr double kPlaneEpsilon = 0.05;

// Equirectangular frame dimensions. Width must be twice the height.
struct FrameGeometry {
    int width = 0;
    int height = 0;

    FrameGeometry() = default;
    FrameGeometry(int w, int h) : width(w), height(h) {
        if (w <= 0 || h <= 0 || w != 2 * h) {
            throw GeometryMismatch("equirectangular geometry requires W = 2*H, got " +
                                   std::to_string(w) + "x" + std::to_string(h));
        }
    }

    bool operator==(const FrameGeometry&) const = default;
};

// Continuous pixel position. Integer values address pixel centers, so
// fractional parts are sub-pixel offsets.
struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

using SpherePoint = Eigen::Vector3d;

enum class PlaneId : uint8_t {
    FrontBack = 0,
    LeftRight = 1,
    TopBottom = 2,
    // Pseudo plane for motion expressed directly in equirectangular pixels.
    ErpDirect = 3,
};

struct MotionPlane {
    PlaneId id = PlaneId::FrontBack;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

// Gnomonic coordinates on a motion plane. The hemisphere sign records which
// side of the plane the source point lies on so the projection stays
// invertible over the whole sphere.
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;
    int hemisphere = +1;
};

PixelCoord wrap_pixel(PixelCoord px, const FrameGeometry& geom);

SpherePoint erp_to_sphere(PixelCoord px, const FrameGeometry& geom);
PixelCoord sphere_to_erp(const SpherePoint& q, const FrameGeometry& geom);

MotionPlane plane_rotation(PlaneId id);

PlanePoint sphere_to_plane(const SpherePoint& q, const MotionPlane& plane);
SpherePoint plane_to_sphere(const PlanePoint& pt, const MotionPlane& plane);

PlanePoint zeta(PixelCoord px, const MotionPlane& plane, const FrameGeometry& geom);
PixelCoord zeta_inv(const PlanePoint& pt, const MotionPlane& plane, const FrameGeometry& geom);

// d(u,v)/d(X,Y) of zeta_inv at pt, holding the hemisphere fixed.
Eigen::Matrix2d zeta_jacobian(const PlanePoint& pt, const MotionPlane& plane,
                              const FrameGeometry& geom);

}  // namespace mpa
