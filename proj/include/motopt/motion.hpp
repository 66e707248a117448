#pragma once

#include "motopt/dual_quaternion.hpp"

#include <vector>

namespace motopt {

/// Rigid-body motion as an unconstrained real six-vector: rotation vector r
/// (radians times unit axis) and translation t. The optimization variable.
template <typename Scalar>
struct Motion {
    Vec3<Scalar> r;
    Vec3<Scalar> t;

    Motion() : r(Vec3<Scalar>::Zero()), t(Vec3<Scalar>::Zero()) {}

    Motion(const Vec3<Scalar>& rotation, const Vec3<Scalar>& translation)
        : r(rotation), t(translation) {
        if (!r.allFinite() || !t.allFinite())
            throw std::invalid_argument("motion component not finite");
    }

    explicit Motion(const Vec6<Scalar>& v) : Motion(v.template head<3>(), v.template tail<3>()) {}

    Vec6<Scalar> to_vector() const {
        Vec6<Scalar> v;
        v << r, t;
        return v;
    }

    Motion operator+(const Motion& o) const { return Motion(r + o.r, t + o.t); }
    Motion operator-(const Motion& o) const { return Motion(r - o.r, t - o.t); }
    Motion operator-() const { return Motion(-r, -t); }
    friend Motion operator*(Scalar a, const Motion& x) { return Motion(a * x.r, a * x.t); }

    bool operator==(const Motion& o) const { return r == o.r && t == o.t; }
};

/// Stack of n motions, a point in R^{6n}.
template <typename Scalar>
using MotionVector = std::vector<Motion<Scalar>>;

/// Translation weight sigma (> 0) of the motion metric.
struct MetricWeights {
    double sigma = 1.0;

    MetricWeights() = default;
    explicit MetricWeights(double s) : sigma(s) {
        if (!(s > 0.0)) throw std::invalid_argument("sigma must be positive");
    }
};

/// Unit quaternion of a rotation vector:
/// [cos(|r|/2), (r/|r|) sin(|r|/2)], identity at r = 0. Below |r| = 1e-8 the
/// factor sin(|r|/2)/|r| is evaluated by its series 1/2 - |r|^2/48 to avoid
/// 0/0; inputs with |r| >= 2*pi wrap through cos/sin.
template <typename Derived>
UnitQuaternion<typename Derived::Scalar> rotation_to_quat(const Eigen::MatrixBase<Derived>& r_in) {
    using Scalar = typename Derived::Scalar;
    using std::cos;
    using std::sin;
    constexpr double kSeriesThreshold = 1e-8;
    const Vec3<Scalar> r = r_in;
    const Scalar theta = r.norm();
    const Scalar sinc_half = theta < Scalar(kSeriesThreshold)
                                 ? Scalar(0.5) - theta * theta / Scalar(48)
                                 : sin(theta / Scalar(2)) / theta;
    return UnitQuaternion<Scalar>(
        Quaternion<Scalar>(cos(theta / Scalar(2)), Vec3<Scalar>(sinc_half * r)));
}

/// Rotation vector of a unit quaternion:
/// (2 acos(q0) / |(q1,q2,q3)|) [q1, q2, q3], zero when q0^2 = 1 (within
/// 1 - q0^2 <= 1e-16). The angle is evaluated as 2 atan2(|(q1,q2,q3)|, q0),
/// which equals 2 acos(q0) on unit quaternions and stays well conditioned
/// near q0 = +-1. Output magnitude lies in [0, 2*pi); it is <= pi iff q0 >= 0.
template <typename Scalar>
Vec3<Scalar> quat_to_rotation(const UnitQuaternion<Scalar>& q) {
    using std::atan2;
    constexpr double kDegenerate = 1e-16;
    const Scalar q0 = q.real();
    const Vec3<Scalar> v = q.imag();
    const Scalar vnorm = v.norm();
    // vnorm == 0 covers inputs one ulp inside the unit tolerance whose
    // imaginary part is exactly zero; 1 - q0^2 can still exceed the threshold
    // there and the quotient theta/vnorm would be 0/0.
    if (Scalar(1) - q0 * q0 <= Scalar(kDegenerate) || vnorm == Scalar(0))
        return Vec3<Scalar>::Zero();
    const Scalar theta = Scalar(2) * atan2(vnorm, q0);
    return (theta / vnorm) * v;
}

/// Unit dual quaternion of a motion: U(r) + (1/2) U(r) [0, t] eps.
template <typename Scalar>
UnitDualQuaternion<Scalar> motion_to_dq(const Motion<Scalar>& x) {
    return dq_from_parts(rotation_to_quat(x.r), x.t);
}

/// Double-cover disambiguation: negate all eight components when the leading
/// scalar is negative, or when it is exactly zero and the first nonzero
/// imaginary component of the standard part is negative. canonical(q) and
/// canonical(-q) are identical, and both map to the same motion.
template <typename Scalar>
UnitDualQuaternion<Scalar> canonical(const UnitDualQuaternion<Scalar>& q) {
    const Scalar q0 = q.standard().real();
    if (q0 < Scalar(0)) return -q;
    if (q0 == Scalar(0)) {
        for (int i = 1; i < 4; ++i) {
            const Scalar c = q.standard()[i];
            if (c != Scalar(0)) return c < Scalar(0) ? -q : q;
        }
    }
    return q;
}

/// Motion of a unit dual quaternion. Canonicalizes first, so the rotation
/// part lands on the sheet with |r| <= pi and q and -q map to the same motion.
template <typename Scalar>
Motion<Scalar> dq_to_motion(const UnitDualQuaternion<Scalar>& q) {
    const UnitDualQuaternion<Scalar> c = canonical(q);
    return Motion<Scalar>(quat_to_rotation(UnitQuaternion<Scalar>(c.standard())),
                          translation_vector(c));
}

/// sqrt(|r|^2 + sigma |t|^2).
template <typename Scalar>
Scalar motion_magnitude(const Motion<Scalar>& x, const MetricWeights& w) {
    using std::sqrt;
    return sqrt(x.r.squaredNorm() + Scalar(w.sigma) * x.t.squaredNorm());
}

/// sqrt of the summed squared motion magnitudes.
template <typename Scalar>
Scalar motion_vector_norm(const MotionVector<Scalar>& v, const MetricWeights& w) {
    using std::sqrt;
    Scalar sum(0);
    for (const Motion<Scalar>& x : v) sum += x.r.squaredNorm() + Scalar(w.sigma) * x.t.squaredNorm();
    return sqrt(sum);
}

/// Lossless layout [r(1), t(1), r(2), t(2), ...] of length 6n. Jacobian
/// column ordering depends on this layout.
template <typename Scalar>
VecX<Scalar> flatten(const MotionVector<Scalar>& v) {
    VecX<Scalar> out(6 * static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out.template segment<6>(6 * static_cast<Eigen::Index>(i)) = v[i].to_vector();
    return out;
}

template <typename Scalar>
MotionVector<Scalar> unflatten(const VecX<Scalar>& v, std::size_t n) {
    if (v.size() != 6 * static_cast<Eigen::Index>(n))
        throw std::invalid_argument("flattened motion vector has wrong length");
    MotionVector<Scalar> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(Vec6<Scalar>(v.template segment<6>(6 * static_cast<Eigen::Index>(i))));
    return out;
}

using Motiond = Motion<double>;
using MotionVectord = MotionVector<double>;

}  // namespace motopt
