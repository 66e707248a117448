#pragma once

#include "motopt/residual.hpp"

#include <cstdint>
#include <random>

namespace motopt {

using Rng = std::mt19937_64;

/// Multiplicative measurement noise: each perturbed measurement is
/// right-composed with the unit dual quaternion of a Gaussian motion, so
/// measurements stay exactly unit.
struct NoiseSpec {
    double rot_sigma = 0.0;    // radians
    double trans_sigma = 0.0;  // length units

    NoiseSpec() = default;
    NoiseSpec(double rot, double trans) : rot_sigma(rot), trans_sigma(trans) {
        if (rot < 0 || trans < 0) throw std::invalid_argument("noise sigmas must be nonnegative");
    }
};

enum class HandEyeModel { one_unknown = 1, two_unknown = 2 };
enum class GraphTopology { chain, cycle, grid };

struct HandEyeInstance {
    HandEyeDataset data;
    MotionVectord ground_truth;  // [q] or [q, p]
    std::uint64_t seed = 0;
    HandEyeModel model = HandEyeModel::one_unknown;
};

struct PoseGraphInstance {
    PoseGraph graph;
    MotionVectord ground_truth;  // one motion per vertex, vertex 1 first
    std::uint64_t seed = 0;
};

/// Rotation angles stay below pi - 0.1 by default, clear of the angle-pi
/// ambiguity and the exceptional antipode; raise max_angle for stress tests.
inline constexpr double kDefaultMaxAngle = 3.0415926535897931;  // pi - 0.1
inline constexpr double kDefaultMaxTrans = 2.0;

/// Axis uniform on the sphere, angle uniform in [0, max_angle], translation
/// components uniform in [-max_trans, max_trans].
Motiond random_motion(Rng& rng, double max_angle = kDefaultMaxAngle,
                      double max_trans = kDefaultMaxTrans);

/// Consistent hand-eye data: draw the ground truth and random b_i, then set
/// a_i = q b_i q^-1 (one unknown) or a_i = p b_i q^-1 (two unknowns), and
/// right-compose each a_i with noise. With zero noise the ground truth
/// achieves objective <= 1e-20.
HandEyeInstance gen_handeye(std::uint64_t seed, int m, HandEyeModel model, NoiseSpec noise = {},
                            double max_angle = kDefaultMaxAngle,
                            double max_trans = kDefaultMaxTrans);

/// Consistent pose graph: draw ground-truth poses, emit topology edges
/// (chain: n-1, cycle: n, grid: lattice neighbors) plus extra loop closures
/// between random distinct non-repeated pairs; q_ij = p_i^* p_j composed with
/// noise.
PoseGraphInstance gen_pose_graph(std::uint64_t seed, int n, GraphTopology topology,
                                 int extra_loop_closures = 0, NoiseSpec noise = {},
                                 double max_angle = kDefaultMaxAngle,
                                 double max_trans = kDefaultMaxTrans);

}  // namespace motopt
