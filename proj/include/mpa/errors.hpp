#pragma once

#include <stdexcept>
#include <string>

namespace mpa {

// Point is too close to the great circle bounding the motion plane
// (|rotated z| below kPlaneEpsilon); plane coordinates are unusable there.
struct NearPlaneSingularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularTransform : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditionedHessian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IncompleteGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedSequence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncatedFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct BadTargetGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewFrames : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoOverlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mpa
