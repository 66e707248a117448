#pragma once

#include "motopt/quaternion.hpp"

namespace motopt {

/// a + b*eps with eps^2 = 0.
template <typename Scalar>
struct DualNumber {
    Scalar standard{0};
    Scalar dual{0};

    bool operator==(const DualNumber&) const = default;
};

/// Pair of quaternions q + q_d*eps over the dual unit (eps^2 = 0, eps central).
template <typename Scalar>
class DualQuaternion {
public:
    DualQuaternion() = default;

    DualQuaternion(const Quaternion<Scalar>& standard, const Quaternion<Scalar>& dual)
        : std_(standard), dual_(dual) {}

    static DualQuaternion identity() {
        return DualQuaternion(Quaternion<Scalar>::identity(), Quaternion<Scalar>::zero());
    }
    static DualQuaternion zero() { return DualQuaternion(); }

    const Quaternion<Scalar>& standard() const { return std_; }
    const Quaternion<Scalar>& dual() const { return dual_; }

    DualQuaternion conjugate() const {
        return DualQuaternion(std_.conjugate(), dual_.conjugate());
    }

    DualQuaternion operator+(const DualQuaternion& o) const {
        return DualQuaternion(std_ + o.std_, dual_ + o.dual_);
    }
    DualQuaternion operator-() const { return DualQuaternion(-std_, -dual_); }
    DualQuaternion operator-(const DualQuaternion& o) const { return *this + (-o); }

    /// p q = (std(p) std(q)) + (std(p) dual(q) + dual(p) std(q)) eps; the
    /// dual(p) dual(q) term carries eps^2 and drops.
    DualQuaternion operator*(const DualQuaternion& o) const {
        return DualQuaternion(std_ * o.std_, std_ * o.dual_ + dual_ * o.std_);
    }

    friend DualQuaternion operator*(Scalar a, const DualQuaternion& q) {
        return DualQuaternion(a * q.std_, a * q.dual_);
    }

    bool operator==(const DualQuaternion& o) const {
        return std_ == o.std_ && dual_ == o.dual_;
    }

private:
    Quaternion<Scalar> std_;
    Quaternion<Scalar> dual_;
};

/// Dual-number magnitude: |std| + (<std, dual> / (2 |std|)) eps when the
/// standard part is nonzero, |dual| eps otherwise. The branch threshold is an
/// exact-scale cutoff, not an epsilon, so residual pipelines never switch
/// branches on rounding noise.
template <typename Scalar>
DualNumber<Scalar> magnitude(const DualQuaternion<Scalar>& q) {
    constexpr double kZeroScale = 1e-300;
    // stableNorm: the plain norm underflows to 0 below ~1e-154 and would
    // mis-select the branch against the exact-scale cutoff
    const Scalar n = q.standard().coeffs().stableNorm();
    if (n < Scalar(kZeroScale)) return {Scalar(0), q.dual().norm()};
    return {n, inner(q.standard(), q.dual()) / (Scalar(2) * n)};
}

/// True iff the standard part has unit magnitude and the parts are orthogonal,
/// both within tol.
template <typename Scalar>
bool is_unit(const DualQuaternion<Scalar>& q, Scalar tol) {
    using std::abs;
    return abs(q.standard().norm() - Scalar(1)) <= tol &&
           abs(inner(q.standard(), q.dual())) <= tol;
}

/// Dual quaternion with unit standard part and orthogonal parts (both enforced
/// at construction to 1e-9); encodes a rigid transform. Inverse = conjugate.
template <typename Scalar>
class UnitDualQuaternion {
public:
    static constexpr double kUnitTol = 1e-9;

    explicit UnitDualQuaternion(const DualQuaternion<Scalar>& q) : q_(q) {
        if (!is_unit(q_, Scalar(kUnitTol)))
            throw std::invalid_argument("dual quaternion does not satisfy the unit conditions");
    }

    static UnitDualQuaternion identity() {
        return UnitDualQuaternion(DualQuaternion<Scalar>::identity());
    }

    const DualQuaternion<Scalar>& dq() const { return q_; }
    operator const DualQuaternion<Scalar>&() const { return q_; }
    const Quaternion<Scalar>& standard() const { return q_.standard(); }
    const Quaternion<Scalar>& dual() const { return q_.dual(); }

    UnitDualQuaternion conjugate() const { return UnitDualQuaternion(q_.conjugate()); }
    UnitDualQuaternion inverse() const { return conjugate(); }

    UnitDualQuaternion operator-() const { return UnitDualQuaternion(-q_); }
    UnitDualQuaternion operator*(const UnitDualQuaternion& o) const {
        return UnitDualQuaternion(q_ * o.q_);
    }

private:
    DualQuaternion<Scalar> q_;
};

/// Unit dual quaternion from a rotation and a translation vector:
/// standard part rot, dual part (1/2) rot [0, t]. Orthogonality holds by
/// construction.
template <typename Scalar, typename Derived>
UnitDualQuaternion<Scalar> dq_from_parts(const UnitQuaternion<Scalar>& rot,
                                         const Eigen::MatrixBase<Derived>& t) {
    const Quaternion<Scalar> dual =
        Scalar(0.5) * (rot.quat() * Quaternion<Scalar>::vector(Vec3<Scalar>(t)));
    return UnitDualQuaternion<Scalar>(DualQuaternion<Scalar>(rot.quat(), dual));
}

/// Translation as a vector quaternion: 2 std^-1 dual. The real component is
/// zero up to rounding by the unit invariant and is forced to exactly zero so
/// 3-vector extraction is exact.
template <typename Scalar>
Quaternion<Scalar> translation_quat(const UnitDualQuaternion<Scalar>& q) {
    const Quaternion<Scalar> t = Scalar(2) * (q.standard().conjugate() * q.dual());
    return Quaternion<Scalar>::vector(t.imag());
}

template <typename Scalar>
Vec3<Scalar> translation_vector(const UnitDualQuaternion<Scalar>& q) {
    return translation_quat(q).imag();
}

using DualNumberd = DualNumber<double>;
using DualQuaterniond = DualQuaternion<double>;
using UnitDualQuaterniond = UnitDualQuaternion<double>;

}  // namespace motopt
