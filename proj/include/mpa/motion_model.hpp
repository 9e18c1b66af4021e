#pragma once

#include <Eigen/Core>
#include <vector>

#include "mpa/geometry.hpp"

namespace mpa {

enum class AffineModel : uint8_t {
    SixParam = 0,
    FourParam = 1,
};

// Affine parameter vector in reading order (a,b,c,d,e,f) for the six
// parameter model and (a,b,e,f) for the four parameter one. The zero vector
// is the identity transform.
struct AffineParams {
    AffineModel model = AffineModel::SixParam;
    Eigen::VectorXd values;

    AffineParams() : values(Eigen::VectorXd::Zero(6)) {}
    explicit AffineParams(AffineModel m)
        : model(m), values(Eigen::VectorXd::Zero(m == AffineModel::SixParam ? 6 : 4)) {}
    AffineParams(AffineModel m, Eigen::VectorXd v) : model(m), values(std::move(v)) {}

    int count() const { return static_cast<int>(values.size()); }
};

// Homogeneous 3x3 affine matrix, last row (0,0,1).
using AffineMatrix = Eigen::Matrix3d;

struct TranslationVector {
    double tx = 0.0;
    double ty = 0.0;
};

enum class MotionModelKind : uint8_t {
    Translational = 0,
    Affine4 = 1,
    Affine6 = 2,
};

// Per-block motion: the plane the parameters live on, the model, and the
// hemisphere sign fixed from the block center at estimation time.
// Translational motion keeps the vector in `params` as (e,f) with an
// identity linear part. Plane ErpDirect means pixel-domain translation.
struct BlockMotion {
    PlaneId plane = PlaneId::FrontBack;
    MotionModelKind kind = MotionModelKind::Translational;
    int hemisphere = +1;
    AffineMatrix transform = AffineMatrix::Identity();

    static BlockMotion translational(PlaneId plane, int hemisphere, TranslationVector t);
    static BlockMotion affine(PlaneId plane, int hemisphere, const AffineParams& p);

    TranslationVector translation() const { return {transform(0, 2), transform(1, 2)}; }
    AffineParams params() const;
};

AffineMatrix affine_matrix(const AffineParams& p);
AffineParams params_from_matrix(const AffineMatrix& a, AffineModel model);

AffineMatrix invert_affine(const AffineMatrix& a);
AffineMatrix compose_update(const AffineMatrix& a, const AffineParams& delta);
AffineMatrix invert_warp_params(const AffineParams& delta);

PixelCoord mpa_warp(PixelCoord px, const BlockMotion& motion, const FrameGeometry& geom);

// Warp with precomputed plane coordinates of the source pixel; the hot path
// used by estimation and compensation.
PixelCoord mpa_warp_plane(const PlanePoint& pt, const BlockMotion& motion,
                          const MotionPlane& plane, const FrameGeometry& geom);

}  // namespace mpa
