#include "motopt/solver.hpp"

#include "motopt/synth.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cstring>

using namespace motopt;
using testutil::max_abs_diff;

namespace {

/// z(x) = A x - c on one motion component, flattened; linear with Jacobian A.
ResidualProblem linear_problem(const Eigen::Matrix<double, 6, 6>& a, const Vec6d& c) {
    return ResidualProblem(1, 1, MetricWeights{}, [a, c](const MotionVectord& x) {
        return unflatten(VecXd(a * flatten(x) - c), 1);
    });
}

}  // namespace

TEST_CASE("jacobian of a constant residual map is zero") {
    const ResidualProblem constant(
        1, 1, MetricWeights{},
        [](const MotionVectord&) { return MotionVectord{Motiond(Vec3d(1, 2, 3), Vec3d(4, 5, 6))}; });
    const Eigen::MatrixXd jac = numeric_jacobian(constant, MotionVectord(1), 1e-6);
    CHECK(jac.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobian of a linear residual map recovers the matrix") {
    testutil::Rng rng(71);
    Eigen::Matrix<double, 6, 6> a;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) a(r, c) = testutil::uniform(rng, -2, 2);
    const ResidualProblem problem = linear_problem(a, Vec6d::Zero());
    const MotionVectord x{testutil::random_motion(rng)};
    const Eigen::MatrixXd jac = numeric_jacobian(problem, x, 1e-6);
    CHECK((jac - a).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("forward and central differences agree to O(h) on a hand-eye instance") {
    const HandEyeInstance inst = gen_handeye(201, 6, HandEyeModel::one_unknown);
    const ResidualProblem problem = handeye_one_unknown(inst.data);
    testutil::Rng rng(72);
    const MotionVectord x{testutil::random_motion(rng)};
    const Eigen::MatrixXd central = numeric_jacobian(problem, x, 1e-6, FdScheme::central);
    const Eigen::MatrixXd forward = numeric_jacobian(problem, x, 1e-6, FdScheme::forward);
    CHECK((central - forward).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK((central - forward).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("non-finite residuals during probing raise EvaluationError") {
    const ResidualProblem bad(1, 1, MetricWeights{}, [](const MotionVectord& x) {
        // valid at the base point, blows up when the first coordinate moves
        Motiond z;
        z.r = Vec3d(x[0].r[0] == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN(), 0, 0);
        return MotionVectord{z};
    });
    CHECK_THROWS_AS(numeric_jacobian(bad, MotionVectord(1), 1e-6), EvaluationError);
    try {
        numeric_jacobian(bad, MotionVectord(1), 1e-6);
    } catch (const EvaluationError& e) {
        CHECK(e.coordinate == 0);
    }
}

TEST_CASE("weighted residuals square to the objective") {
    const HandEyeInstance inst = gen_handeye(202, 5, HandEyeModel::one_unknown,
                                             NoiseSpec(0.05, 0.05));
    const MetricWeights w(3.0);
    const ResidualProblem problem = handeye_one_unknown(inst.data, w);
    testutil::Rng rng(73);
    const MotionVectord x{testutil::random_motion(rng)};
    const VecXd wz = weighted_residuals(problem, x);
    CHECK(std::abs(0.5 * wz.squaredNorm() - objective(problem, x)) <= 1e-14);
}

TEST_CASE("levenberg-marquardt from the ground truth stops immediately") {
    const HandEyeInstance inst = gen_handeye(203, 10, HandEyeModel::one_unknown);
    const ResidualProblem problem = handeye_one_unknown(inst.data);
    const SolveReport report = levenberg_marquardt(problem, inst.ground_truth);
    CHECK(report.iterations <= 1);
    CHECK(report.final_objective <= 1e-20);
    CHECK(report.converged == ConvergenceReason::objective);
}

TEST_CASE("levenberg-marquardt solves noiseless hand-eye from zero") {
    const HandEyeInstance inst = gen_handeye(204, 10, HandEyeModel::one_unknown,
                                             NoiseSpec{}, 3.0415926535897931 - 0.3);
    const ResidualProblem problem = handeye_one_unknown(inst.data);
    const SolveReport report = levenberg_marquardt(problem, MotionVectord(1));
    CHECK(report.final_objective <= 1e-12);
    CHECK(max_abs_diff(report.final_x[0], inst.ground_truth[0]) <= 1e-6);
    CHECK(report.iterations <= 200);

    // accepted-step trace is strictly decreasing
    for (std::size_t i = 1; i < report.trace.size(); ++i)
        CHECK(report.trace[i] < report.trace[i - 1]);
}

TEST_CASE("all three families converge from a perturbed start") {
    testutil::Rng rng(74);
    auto perturb = [&rng](const MotionVectord& truth) {
        MotionVectord x;
        for (const Motiond& m : truth) {
            const Vec3d dr = 0.25 * testutil::random_rotation_vector(rng, 0.0, 1.0);
            x.push_back(Motiond(m.r + dr, m.t + testutil::random_vec3(rng, 0.2)));
        }
        return x;
    };

    const HandEyeInstance he1 = gen_handeye(205, 10, HandEyeModel::one_unknown);
    const ResidualProblem p1 = handeye_one_unknown(he1.data);
    CHECK(levenberg_marquardt(p1, perturb(he1.ground_truth)).final_objective <= 1e-12);

    const HandEyeInstance he2 = gen_handeye(206, 12, HandEyeModel::two_unknown);
    const ResidualProblem p2 = handeye_two_unknown(he2.data);
    CHECK(levenberg_marquardt(p2, perturb(he2.ground_truth)).final_objective <= 1e-12);

    const PoseGraphInstance pg = gen_pose_graph(207, 6, GraphTopology::cycle, 1);
    const ResidualProblem p3 = slam_problem(pg.graph, true);
    const UnitDualQuaterniond g = motion_to_dq(pg.ground_truth[0]).inverse();
    MotionVectord aligned;
    for (const Motiond& m : pg.ground_truth) aligned.push_back(dq_to_motion(g * motion_to_dq(m)));
    CHECK(levenberg_marquardt(p3, perturb(p3.extract_free(aligned))).final_objective <= 1e-12);
}

TEST_CASE("solver is deterministic") {
    const PoseGraphInstance inst = gen_pose_graph(208, 5, GraphTopology::cycle, 1,
                                                  NoiseSpec(0.01, 0.01));
    const ResidualProblem problem = slam_problem(inst.graph, true);
    const MotionVectord x0 = problem.extract_free(spanning_tree_init(inst.graph));
    const SolveReport a = levenberg_marquardt(problem, x0);
    const SolveReport b = levenberg_marquardt(problem, x0);
    CHECK(a.iterations == b.iterations);
    CHECK(a.converged == b.converged);
    CHECK(a.trace == b.trace);
    for (std::size_t i = 0; i < a.final_x.size(); ++i) {
        const Vec6d va = a.final_x[i].to_vector(), vb = b.final_x[i].to_vector();
        CHECK(std::memcmp(va.data(), vb.data(), sizeof(double) * 6) == 0);
    }
}

TEST_CASE("the objective never increases, even on noisy far starts") {
    const PoseGraphInstance inst = gen_pose_graph(209, 6, GraphTopology::cycle, 2,
                                                  NoiseSpec(0.05, 0.05));
    const ResidualProblem problem = slam_problem(inst.graph, true);
    const MotionVectord x0(static_cast<std::size_t>(problem.free_count()));
    const SolveReport report = levenberg_marquardt(problem, x0);
    CHECK(report.final_objective <= report.trace.front());
    for (std::size_t i = 1; i < report.trace.size(); ++i)
        CHECK(report.trace[i] < report.trace[i - 1]);
}

TEST_CASE("non-finite start is an input error") {
    const HandEyeInstance inst = gen_handeye(210, 4, HandEyeModel::one_unknown);
    const ResidualProblem problem = handeye_one_unknown(inst.data);
    MotionVectord x0(1);
    x0[0].r[0] = std::numeric_limits<double>::quiet_NaN();  // bypasses the checked constructor
    CHECK_THROWS_AS(levenberg_marquardt(problem, x0), std::invalid_argument);
    CHECK_THROWS_AS(levenberg_marquardt(problem, MotionVectord(2)), std::invalid_argument);
}

TEST_CASE("gradient check: quadratic toy is exact to rounding") {
    testutil::Rng rng(75);
    Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Identity();
    a(0, 3) = 0.5;
    a(2, 1) = -0.25;
    Vec6d c;
    for (int i = 0; i < 6; ++i) c[i] = testutil::uniform(rng, -1, 1);
    const ResidualProblem problem = linear_problem(a, c);
    const MotionVectord x{testutil::random_motion(rng)};
    CHECK(gradient_check(problem, x) <= 1e-8);
}

TEST_CASE("gradient check on problem families") {
    const HandEyeInstance he = gen_handeye(211, 8, HandEyeModel::one_unknown,
                                           NoiseSpec(0.02, 0.02));
    const ResidualProblem problem = handeye_one_unknown(he.data);
    testutil::Rng rng(76);
    for (int i = 0; i < 5; ++i) {
        const MotionVectord x{testutil::random_motion(rng)};
        CHECK(gradient_check(problem, x) <= 1e-4);
    }

    // at a zero-residual point both gradient routes are tiny
    const HandEyeInstance clean = gen_handeye(212, 8, HandEyeModel::one_unknown);
    const ResidualProblem cp = handeye_one_unknown(clean.data);
    const Eigen::MatrixXd jac = numeric_jacobian(cp, clean.ground_truth, 1e-6);
    const VecXd g = jac.transpose() * weighted_residuals(cp, clean.ground_truth);
    CHECK(g.lpNorm<Eigen::Infinity>() <= 1e-8);
    const VecXd flat = flatten(clean.ground_truth);
    for (Eigen::Index k = 0; k < flat.size(); ++k) {
        VecXd plus = flat, minus = flat;
        plus[k] += 1e-6;
        minus[k] -= 1e-6;
        const double fd = (objective(cp, unflatten(plus, 1)) - objective(cp, unflatten(minus, 1))) /
                          2e-6;
        CHECK(std::abs(fd) <= 1e-8);
    }
}

TEST_CASE("solver options are validated") {
    SolverOptions opts;
    opts.grad_tol = 0;
    CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
    opts = {};
    opts.lambda_down = 1.5;
    CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
    opts = {};
    opts.lambda_up = 0.5;
    CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
    CHECK_NOTHROW(SolverOptions{}.validate());
}

TEST_CASE("randomized restarts escape a local minimum") {
    // asymmetric double well in the first coordinate: local minimum near
    // u = -1, global zero at u = +1
    const ResidualProblem problem(1, 1, MetricWeights{}, [](const MotionVectord& x) {
        const double u = x[0].r[0];
        Motiond z;
        z.r = Vec3d(u * u - 1.0, 0.1 * (u - 1.0), x[0].r[1]);
        z.t = Vec3d(x[0].r[2], x[0].t[0], x[0].t[1]);
        return MotionVectord{z};
    });
    MotionVectord x0(1);
    x0[0].r[0] = -0.5;

    const SolveReport stuck = levenberg_marquardt(problem, x0);
    CHECK(stuck.final_objective > 1e-4);  // trapped in the left well

    SolverOptions opts;
    opts.max_restarts = 8;
    opts.seed = 99;
    const SolveReport rescued = levenberg_marquardt(problem, x0, opts);
    CHECK(rescued.final_objective <= 1e-10);
    CHECK(rescued.restarts_used >= 1);
}
