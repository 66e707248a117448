#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace motopt {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Real four-vector [q0, q1, q2, q3] (scalar first) under the Hamilton product.
/// Construction rejects non-finite components; every operation below is pure,
/// so values are safe to share across threads.
template <typename Scalar>
class Quaternion {
public:
    Quaternion() : c_(Vec4<Scalar>::Zero()) {}

    Quaternion(Scalar q0, Scalar q1, Scalar q2, Scalar q3) : c_(q0, q1, q2, q3) {
        require_finite();
    }

    explicit Quaternion(const Vec4<Scalar>& coeffs) : c_(coeffs) { require_finite(); }

    Quaternion(Scalar real, const Vec3<Scalar>& imag) {
        c_ << real, imag[0], imag[1], imag[2];
        require_finite();
    }

    /// Vector quaternion [0, v].
    static Quaternion vector(const Vec3<Scalar>& v) { return Quaternion(Scalar(0), v); }

    static Quaternion identity() { return Quaternion(Scalar(1), Scalar(0), Scalar(0), Scalar(0)); }
    static Quaternion zero() { return Quaternion(); }

    Scalar real() const { return c_[0]; }
    Vec3<Scalar> imag() const { return c_.template tail<3>(); }
    const Vec4<Scalar>& coeffs() const { return c_; }
    Scalar operator[](int i) const { return c_[i]; }

    Scalar norm() const { return c_.norm(); }
    Scalar squared_norm() const { return c_.squaredNorm(); }

    Quaternion conjugate() const { return Quaternion(c_[0], -c_[1], -c_[2], -c_[3]); }

    Quaternion operator+(const Quaternion& o) const { return Quaternion(Vec4<Scalar>(c_ + o.c_)); }
    Quaternion operator-(const Quaternion& o) const { return Quaternion(Vec4<Scalar>(c_ - o.c_)); }
    Quaternion operator-() const { return Quaternion(Vec4<Scalar>(-c_)); }

    /// Hamilton product (noncommutative; i*j = k).
    Quaternion operator*(const Quaternion& o) const {
        const Vec4<Scalar>& p = c_;
        const Vec4<Scalar>& q = o.c_;
        return Quaternion(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
                          p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
                          p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
                          p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]);
    }

    friend Quaternion operator*(Scalar a, const Quaternion& q) {
        return Quaternion(Vec4<Scalar>(a * q.c_));
    }
    friend Quaternion operator*(const Quaternion& q, Scalar a) { return a * q; }

    bool operator==(const Quaternion& o) const { return c_ == o.c_; }

private:
    void require_finite() const {
        if (!c_.allFinite()) throw std::invalid_argument("quaternion component not finite");
    }

    Vec4<Scalar> c_;
};

/// Inner product Re(p q* + q p*); equals 2 (p0 q0 + p1 q1 + p2 q2 + p3 q3).
template <typename Scalar>
Scalar inner(const Quaternion<Scalar>& p, const Quaternion<Scalar>& q) {
    return Scalar(2) * p.coeffs().dot(q.coeffs());
}

/// q* / |q|^2. Throws std::domain_error for the zero quaternion.
template <typename Scalar>
Quaternion<Scalar> inverse(const Quaternion<Scalar>& q) {
    const Scalar n2 = q.squared_norm();
    if (n2 == Scalar(0)) throw std::domain_error("zero quaternion is not invertible");
    return (Scalar(1) / n2) * q.conjugate();
}

/// Quaternion whose magnitude is within kUnitTol of one. `normalize` rescales
/// inputs that are off by at most kNormalizeTol; anything farther is rejected.
template <typename Scalar>
class UnitQuaternion {
public:
    static constexpr double kUnitTol = 1e-9;
    static constexpr double kNormalizeTol = 1e-6;

    explicit UnitQuaternion(const Quaternion<Scalar>& q) : q_(q) {
        using std::abs;
        if (abs(q_.norm() - Scalar(1)) > Scalar(kUnitTol))
            throw std::invalid_argument("quaternion magnitude differs from 1 beyond tolerance");
    }

    static UnitQuaternion identity() { return UnitQuaternion(Quaternion<Scalar>::identity()); }

    static UnitQuaternion normalize(const Quaternion<Scalar>& q) {
        using std::abs;
        const Scalar n = q.norm();
        if (abs(n - Scalar(1)) > Scalar(kNormalizeTol))
            throw std::invalid_argument("quaternion too far from unit to normalize");
        return UnitQuaternion(Quaternion<Scalar>(Vec4<Scalar>(q.coeffs() / n)));
    }

    const Quaternion<Scalar>& quat() const { return q_; }
    operator const Quaternion<Scalar>&() const { return q_; }

    Scalar real() const { return q_.real(); }
    Vec3<Scalar> imag() const { return q_.imag(); }
    Scalar operator[](int i) const { return q_[i]; }

    UnitQuaternion conjugate() const { return UnitQuaternion(q_.conjugate()); }
    /// For unit quaternions the inverse is the conjugate.
    UnitQuaternion inverse() const { return conjugate(); }

    UnitQuaternion operator-() const { return UnitQuaternion(-q_); }
    UnitQuaternion operator*(const UnitQuaternion& o) const { return UnitQuaternion(q_ * o.q_); }

private:
    Quaternion<Scalar> q_;
};

/// Closed-form square of a unit quaternion: [2 q0^2 - 1, 2 q0 q1, 2 q0 q2, 2 q0 q3].
/// Agrees with the Hamilton product q*q; kept as an independent code path.
template <typename Scalar>
Quaternion<Scalar> unit_square(const UnitQuaternion<Scalar>& u) {
    const Quaternion<Scalar>& q = u.quat();
    const Scalar q0 = q.real();
    return Quaternion<Scalar>(Scalar(2) * q0 * q0 - Scalar(1), Scalar(2) * q0 * q[1],
                              Scalar(2) * q0 * q[2], Scalar(2) * q0 * q[3]);
}

using Quaterniond = Quaternion<double>;
using UnitQuaterniond = UnitQuaternion<double>;
using Vec3d = Vec3<double>;
using Vec4d = Vec4<double>;
using Vec6d = Vec6<double>;
using VecXd = VecX<double>;

}  // namespace motopt
