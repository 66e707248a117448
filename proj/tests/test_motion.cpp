#include "motopt/motion.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <numbers>

using namespace motopt;
using testutil::max_abs_diff;
using testutil::random_motion;
using testutil::random_rotation_vector;
using testutil::random_unit_dq;
using testutil::random_unit_quat;
using testutil::random_vec3;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("rotation_to_quat basics") {
    CHECK(rotation_to_quat(Vec3d::Zero()).quat() == Quaterniond::identity());
    CHECK(max_abs_diff(rotation_to_quat(Vec3d(kPi, 0, 0)).quat(), Quaterniond(0, 1, 0, 0)) <=
          1e-15);

    // series branch: sin(theta/2)/theta collapses to 1/2 for tiny angles
    const UnitQuaterniond tiny = rotation_to_quat(Vec3d(1e-12, 0, 0));
    CHECK(tiny.real() == 1.0);
    CHECK(tiny[1] == 5e-13);
    CHECK(tiny[2] == 0.0);
    CHECK(tiny[3] == 0.0);

    // series and direct formula agree where both are stable
    const double theta = 1e-6;
    const double series = 0.5 - theta * theta / 48.0;
    const double direct = std::sin(theta / 2) / theta;
    CHECK(std::abs(series - direct) <= 1e-16);

    // |r| >= 2*pi wraps through cos/sin
    const Vec3d wrapped(2 * kPi + 0.5, 0, 0);
    CHECK(max_abs_diff(rotation_to_quat(wrapped).quat(), -rotation_to_quat(Vec3d(0.5, 0, 0)).quat()) <=
          1e-15);
}

TEST_CASE("quat_to_rotation basics") {
    CHECK(quat_to_rotation(UnitQuaterniond::identity()) == Vec3d::Zero());
    CHECK((quat_to_rotation(UnitQuaterniond(Quaterniond(0, 1, 0, 0))) - Vec3d(kPi, 0, 0))
              .cwiseAbs()
              .maxCoeff() <= 1e-15);
    // the antipode hits the degenerate branch
    CHECK(quat_to_rotation(UnitQuaterniond(Quaterniond(-1, 0, 0, 0))) == Vec3d::Zero());
}

TEST_CASE("round trip A: R(U(r)) = r on basic rotation vectors") {
    testutil::Rng rng(41);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3d r = random_rotation_vector(rng, 0.0, 2 * kPi - 1e-6);
        const Vec3d back = quat_to_rotation(rotation_to_quat(r));
        worst = std::max(worst, (back - r).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("round trip B: U(R(q)) = q away from the antipode") {
    testutil::Rng rng(42);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        UnitQuaterniond q = random_unit_quat(rng);
        if (q.real() <= -1 + 1e-12) q = -q;
        const UnitQuaterniond back = rotation_to_quat(quat_to_rotation(q));
        worst = std::max(worst, max_abs_diff(back.quat(), q.quat()));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("motion_to_dq basics") {
    const Vec3d t(0.3, -0.7, 1.1);
    const UnitDualQuaterniond pure = motion_to_dq(Motiond(Vec3d::Zero(), t));
    CHECK(pure.standard() == Quaterniond::identity());
    CHECK(max_abs_diff(pure.dual(), 0.5 * Quaterniond::vector(t)) == 0.0);

    CHECK(motion_to_dq(Motiond{}).dq() == DualQuaterniond::identity());

    testutil::Rng rng(43);
    for (int i = 0; i < 200; ++i) {
        CHECK(is_unit(motion_to_dq(random_motion(rng)).dq(), 1e-12));
    }
}

TEST_CASE("canonical picks the nonnegative-scalar sheet") {
    const UnitDualQuaterniond neg(-UnitDualQuaterniond::identity());
    CHECK(canonical(neg).standard() == Quaterniond::identity());

    testutil::Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        const UnitDualQuaterniond q = random_unit_dq(rng);
        if (q.standard().real() > 0) CHECK(canonical(q).dq() == q.dq());
        CHECK(max_abs_diff(dq_to_motion(q), dq_to_motion(-q)) == 0.0);
    }

    // scalar exactly zero: tie broken by the first nonzero imaginary component
    const UnitDualQuaterniond tie = dq_from_parts(
        UnitQuaterniond(Quaterniond(0, -1, 0, 0)), Vec3d(1, 2, 3));
    CHECK(canonical(tie).standard()[1] == 1.0);
}

TEST_CASE("round trip C: motions and unit dual quaternions") {
    CHECK(max_abs_diff(dq_to_motion(UnitDualQuaterniond::identity()), Motiond{}) == 0.0);

    testutil::Rng rng(45);
    double worst_motion = 0, worst_dq = 0;
    for (int i = 0; i < 10000; ++i) {
        const Motiond x(random_rotation_vector(rng, 0.0, kPi - 1e-6), random_vec3(rng));
        worst_motion = std::max(worst_motion, max_abs_diff(dq_to_motion(motion_to_dq(x)), x));

        const UnitDualQuaterniond q = random_unit_dq(rng);
        worst_dq = std::max(worst_dq,
                            max_abs_diff(motion_to_dq(dq_to_motion(q)).dq(), canonical(q).dq()));
    }
    CHECK(worst_motion <= 1e-10);
    CHECK(worst_dq <= 1e-10);
}

TEST_CASE("identity maps: idle rotation and idle motion") {
    CHECK(quat_to_rotation(UnitQuaterniond::identity()) == Vec3d::Zero());
    CHECK(rotation_to_quat(Vec3d::Zero()).quat() == Quaterniond::identity());
    CHECK(max_abs_diff(dq_to_motion(UnitDualQuaterniond::identity()), Motiond{}) == 0.0);
    CHECK(motion_to_dq(Motiond{}).dq() == DualQuaterniond::identity());
}

TEST_CASE("negated rotation vector gives the inverse quaternion") {
    testutil::Rng rng(46);
    for (int i = 0; i < 1000; ++i) {
        const Vec3d r = random_rotation_vector(rng, 0.0, 2 * kPi - 0.1);
        CHECK(max_abs_diff(rotation_to_quat(-r).quat(), rotation_to_quat(r).inverse().quat()) <=
              1e-12);
        // equivalently R(q^-1) = -R(q)
        const UnitQuaterniond q = random_unit_quat(rng);
        CHECK((quat_to_rotation(q.inverse()) + quat_to_rotation(q)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("inverse of a motion's dual quaternion") {
    // The componentwise negation -x only inverts the transform when the
    // translation is fixed by the rotation; the true inverse motion
    // counter-rotates the translation.
    testutil::Rng rng(47);
    for (int i = 0; i < 1000; ++i) {
        const Motiond x = random_motion(rng);
        const UnitQuaterniond u = rotation_to_quat(x.r);
        const Vec3d rotated_t = (u.quat() * Quaterniond::vector(x.t) * u.quat().conjugate()).imag();
        const Motiond x_inv(-x.r, -rotated_t);
        CHECK(max_abs_diff(motion_to_dq(x_inv).dq(), motion_to_dq(x).inverse().dq()) <= 1e-12);
    }

    // componentwise negation does invert pure rotations, pure translations,
    // and motions whose translation lies along the rotation axis
    for (int i = 0; i < 200; ++i) {
        const Vec3d r = random_rotation_vector(rng, 0.0, 3.0);
        const Vec3d t = random_vec3(rng);
        for (const Motiond& x : {Motiond(r, Vec3d::Zero()), Motiond(Vec3d::Zero(), t),
                                 Motiond(r, testutil::uniform(rng, -2, 2) * r)}) {
            CHECK(max_abs_diff(motion_to_dq(-x).dq(), motion_to_dq(x).inverse().dq()) <= 1e-12);
        }
    }
}

TEST_CASE("doubled rotation: R of the square against both branches") {
    // With R(q) = theta * l, the raw R of q^2 equals 2*theta*l below pi and
    // wraps by exactly -2*pi*l above it; verified against direct squaring.
    testutil::Rng rng(48);
    const double grid[] = {0.1, 1.0, kPi - 0.01, kPi + 0.01, 5.0, 2 * kPi - 0.1};
    for (const double theta : grid) {
        for (int rep = 0; rep < 10; ++rep) {
            const Vec3d axis = random_rotation_vector(rng, 1.0, 1.0);
            const UnitQuaterniond q = rotation_to_quat(Vec3d(theta * axis));
            const UnitQuaterniond square(q.quat() * q.quat());
            const Vec3d raw = quat_to_rotation(square);
            const Vec3d predicted =
                theta < kPi ? Vec3d(2 * theta * axis) : Vec3d(2 * (theta - kPi) * axis);
            const Vec3d wrap = theta < kPi ? Vec3d::Zero() : Vec3d(-2 * kPi * axis);
            CHECK((raw - predicted - wrap).cwiseAbs().maxCoeff() <= 1e-9);
            // closed-form squaring sees the same branch
            CHECK(max_abs_diff(unit_square(q), square.quat()) <= 1e-12);
        }
    }
}

TEST_CASE("composition is not additive: frozen witnesses") {
    const UnitQuaterniond p = rotation_to_quat(Vec3d(kPi / 2, 0, 0));
    const UnitQuaterniond q = rotation_to_quat(Vec3d(0, kPi / 2, 0));
    const Vec3d gap =
        quat_to_rotation(p * q) - quat_to_rotation(p) - quat_to_rotation(q);
    CHECK(gap.norm() > 0.1);

    const UnitDualQuaterniond ph = motion_to_dq(Motiond(Vec3d(kPi / 2, 0, 0), Vec3d(1, 0, 0)));
    const UnitDualQuaterniond qh = motion_to_dq(Motiond(Vec3d(0, kPi / 2, 0), Vec3d(0, 1, 0)));
    const Vec6d mgap = dq_to_motion(ph * qh).to_vector() - dq_to_motion(ph).to_vector() -
                       dq_to_motion(qh).to_vector();
    CHECK(mgap.norm() > 0.1);
}

TEST_CASE("motion magnitude and motion-vector norm") {
    CHECK(motion_magnitude(Motiond{}, MetricWeights{}) == 0.0);
    CHECK(motion_magnitude(Motiond(Vec3d(3, 0, 0), Vec3d(4, 0, 0)), MetricWeights{}) == 5.0);
    CHECK(motion_magnitude(Motiond(Vec3d::Zero(), Vec3d(1, 1, 1)), MetricWeights(4.0)) ==
          doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-15));

    const MetricWeights w;
    CHECK(motion_vector_norm(MotionVectord{Motiond{}, Motiond{}}, w) == 0.0);
    const MotionVectord two{Motiond(Vec3d(3, 0, 0), Vec3d::Zero()),
                            Motiond(Vec3d::Zero(), Vec3d(4, 0, 0))};
    CHECK(motion_vector_norm(two, w) == 5.0);

    testutil::Rng rng(49);
    for (int i = 0; i < 1000; ++i) {
        const MetricWeights wr(testutil::uniform(rng, 0.1, 5.0));
        MotionVectord a, b, sum;
        for (int k = 0; k < 3; ++k) {
            a.push_back(random_motion(rng));
            b.push_back(random_motion(rng));
            sum.push_back(a.back() + b.back());
        }
        // norm axioms: triangle inequality, homogeneity, positivity
        CHECK(motion_vector_norm(sum, wr) <=
              motion_vector_norm(a, wr) + motion_vector_norm(b, wr) + 1e-12);
        const double s = testutil::uniform(rng, -3.0, 3.0);
        MotionVectord scaled;
        for (const Motiond& m : a) scaled.push_back(s * m);
        CHECK(std::abs(motion_vector_norm(scaled, wr) - std::abs(s) * motion_vector_norm(a, wr)) <=
              1e-12 * (1 + motion_vector_norm(a, wr)));
        CHECK(motion_vector_norm(a, wr) > 0.0);
    }
}

TEST_CASE("flatten and unflatten") {
    testutil::Rng rng(50);
    MotionVectord v;
    for (int i = 0; i < 4; ++i) v.push_back(random_motion(rng));
    const VecXd flat = flatten(v);
    CHECK(flat.size() == 24);
    const MotionVectord back = unflatten(flat, 4);
    for (int i = 0; i < 4; ++i) CHECK(back[static_cast<std::size_t>(i)] == v[static_cast<std::size_t>(i)]);

    // n = 1 is the identity layout [r, t]
    const Motiond single = random_motion(rng);
    CHECK(flatten(MotionVectord{single}) == single.to_vector());

    CHECK_THROWS_AS(unflatten(flat, 3), std::invalid_argument);
}

TEST_CASE("metric weights validation") {
    CHECK_THROWS_AS(MetricWeights(0.0), std::invalid_argument);
    CHECK_THROWS_AS(MetricWeights(-1.0), std::invalid_argument);
    CHECK(MetricWeights{}.sigma == 1.0);
}
