#include "mpa/motion_model.hpp"

#include <cmath>

namespace mpa {

namespace {

void check_last_row(const AffineMatrix& a) {
    if (a(2, 0) != 0.0 || a(2, 1) != 0.0 || a(2, 2) != 1.0) {
        throw SingularTransform("affine matrix last row must be (0,0,1)");
    }
}

}  // namespace

AffineMatrix affine_matrix(const AffineParams& p) {
    AffineMatrix a = AffineMatrix::Identity();
    const auto& v = p.values;
    if (p.model == AffineModel::SixParam) {
        a(0, 0) = v[0] + 1.0;
        a(0, 1) = v[1];
        a(0, 2) = v[4];
        a(1, 0) = v[2];
        a(1, 1) = v[3] + 1.0;
        a(1, 2) = v[5];
    } else {
        a(0, 0) = v[0] + 1.0;
        a(0, 1) = v[1];
        a(0, 2) = v[2];
        a(1, 0) = -v[1];
        a(1, 1) = v[0] + 1.0;
        a(1, 2) = v[3];
    }
    return a;
}

AffineParams params_from_matrix(const AffineMatrix& a, AffineModel model) {
    AffineParams p(model);
    if (model == AffineModel::SixParam) {
        p.values << a(0, 0) - 1.0, a(0, 1), a(1, 0), a(1, 1) - 1.0, a(0, 2), a(1, 2);
    } else {
        // Symmetrize; a four parameter matrix satisfies a11 = a00, a10 = -a01
        // up to floating point noise.
        p.values << 0.5 * (a(0, 0) + a(1, 1)) - 1.0, 0.5 * (a(0, 1) - a(1, 0)), a(0, 2), a(1, 2);
    }
    return p;
}

AffineMatrix invert_affine(const AffineMatrix& a) {
    check_last_row(a);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(det) < 1e-12) {
        throw SingularTransform("affine 2x2 determinant below 1e-12");
    }
    AffineMatrix inv = AffineMatrix::Identity();
    inv(0, 0) = a(1, 1) / det;
    inv(0, 1) = -a(0, 1) / det;
    inv(1, 0) = -a(1, 0) / det;
    inv(1, 1) = a(0, 0) / det;
    inv(0, 2) = -(inv(0, 0) * a(0, 2) + inv(0, 1) * a(1, 2));
    inv(1, 2) = -(inv(1, 0) * a(0, 2) + inv(1, 1) * a(1, 2));
    return inv;
}

AffineMatrix compose_update(const AffineMatrix& a, const AffineParams& delta) {
    return a * invert_affine(affine_matrix(delta));
}

AffineMatrix invert_warp_params(const AffineParams& delta) {
    return invert_affine(affine_matrix(delta));
}

BlockMotion BlockMotion::translational(PlaneId plane, int hemisphere, TranslationVector t) {
    BlockMotion m;
    m.plane = plane;
    m.kind = MotionModelKind::Translational;
    m.hemisphere = hemisphere;
    m.transform(0, 2) = t.tx;
    m.transform(1, 2) = t.ty;
    return m;
}

BlockMotion BlockMotion::affine(PlaneId plane, int hemisphere, const AffineParams& p) {
    BlockMotion m;
    m.plane = plane;
    m.kind = p.model == AffineModel::SixParam ? MotionModelKind::Affine6 : MotionModelKind::Affine4;
    m.hemisphere = hemisphere;
    m.transform = affine_matrix(p);
    return m;
}

AffineParams BlockMotion::params() const {
    switch (kind) {
        case MotionModelKind::Affine6:
            return params_from_matrix(transform, AffineModel::SixParam);
        case MotionModelKind::Affine4:
            return params_from_matrix(transform, AffineModel::FourParam);
        case MotionModelKind::Translational: {
            AffineParams p(AffineModel::FourParam);
            p.values << 0.0, 0.0, transform(0, 2), transform(1, 2);
            return p;
        }
    }
    throw std::logic_error("bad motion model kind");
}

PixelCoord mpa_warp_plane(const PlanePoint& pt, const BlockMotion& motion,
                          const MotionPlane& plane, const FrameGeometry& geom) {
    const auto& a = motion.transform;
    PlanePoint moved;
    moved.x = a(0, 0) * pt.x + a(0, 1) * pt.y + a(0, 2);
    moved.y = a(1, 0) * pt.x + a(1, 1) * pt.y + a(1, 2);
    moved.hemisphere = motion.hemisphere;
    return zeta_inv(moved, plane, geom);
}

PixelCoord mpa_warp(PixelCoord px, const BlockMotion& motion, const FrameGeometry& geom) {
    if (motion.plane == PlaneId::ErpDirect) {
        return {px.u + motion.transform(0, 2), px.v + motion.transform(1, 2)};
    }
    const MotionPlane plane = plane_rotation(motion.plane);
    const PlanePoint pt = zeta(px, plane, geom);
    return mpa_warp_plane(pt, motion, plane, geom);
}

}  // namespace mpa
