#include "motopt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace motopt {

namespace {

Vec3d random_unit_axis(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3d v;
    do {
        for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
    } while (v.norm() < 1e-12);
    return v.normalized();
}

UnitDualQuaterniond noise_dq(Rng& rng, const NoiseSpec& noise) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3d dr, dt;
    for (int i = 0; i < 3; ++i) dr[i] = noise.rot_sigma * gauss(rng);
    for (int i = 0; i < 3; ++i) dt[i] = noise.trans_sigma * gauss(rng);
    return motion_to_dq(Motiond(dr, dt));
}

}  // namespace

Motiond random_motion(Rng& rng, double max_angle, double max_trans) {
    if (max_angle < 0 || max_trans < 0)
        throw std::invalid_argument("random_motion bounds must be nonnegative");
    const Vec3d axis = random_unit_axis(rng);
    std::uniform_real_distribution<double> angle_dist(0.0, max_angle);
    std::uniform_real_distribution<double> trans_dist(-max_trans, max_trans);
    const double angle = max_angle > 0 ? angle_dist(rng) : 0.0;
    Vec3d t = Vec3d::Zero();
    if (max_trans > 0)
        for (int i = 0; i < 3; ++i) t[i] = trans_dist(rng);
    return Motiond(angle * axis, t);
}

HandEyeInstance gen_handeye(std::uint64_t seed, int m, HandEyeModel model, NoiseSpec noise,
                            double max_angle, double max_trans) {
    if (m < 1) throw std::invalid_argument("hand-eye instance needs m >= 1");
    Rng rng(seed);

    const Motiond x_q = random_motion(rng, max_angle, max_trans);
    const UnitDualQuaterniond q = motion_to_dq(x_q);
    MotionVectord truth{x_q};
    UnitDualQuaterniond p = q;
    if (model == HandEyeModel::two_unknown) {
        const Motiond x_p = random_motion(rng, max_angle, max_trans);
        p = motion_to_dq(x_p);
        truth.push_back(x_p);
    }

    std::vector<HandEyePair> pairs;
    pairs.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const UnitDualQuaterniond b = motion_to_dq(random_motion(rng, max_angle, max_trans));
        UnitDualQuaterniond a = p * b * q.inverse();
        if (noise.rot_sigma > 0 || noise.trans_sigma > 0) a = a * noise_dq(rng, noise);
        pairs.push_back({a, b});
    }
    return {HandEyeDataset(std::move(pairs)), std::move(truth), seed, model};
}

PoseGraphInstance gen_pose_graph(std::uint64_t seed, int n, GraphTopology topology,
                                 int extra_loop_closures, NoiseSpec noise, double max_angle,
                                 double max_trans) {
    if (n < 2) throw std::invalid_argument("pose graph instance needs n >= 2");
    if (extra_loop_closures < 0)
        throw std::invalid_argument("loop closure count must be nonnegative");
    Rng rng(seed);

    MotionVectord truth;
    std::vector<UnitDualQuaterniond> poses;
    truth.reserve(static_cast<std::size_t>(n));
    poses.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        truth.push_back(random_motion(rng, max_angle, max_trans));
        poses.push_back(motion_to_dq(truth.back()));
    }

    std::vector<std::pair<int, int>> pairs;  // 1-based (i, j)
    switch (topology) {
        case GraphTopology::chain:
            for (int i = 1; i < n; ++i) pairs.emplace_back(i, i + 1);
            break;
        case GraphTopology::cycle:
            for (int i = 1; i < n; ++i) pairs.emplace_back(i, i + 1);
            pairs.emplace_back(n, 1);
            break;
        case GraphTopology::grid: {
            const int rows = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
            const int cols = (n + rows - 1) / rows;
            // scan order: each vertex is introduced by an edge from its left or
            // upper neighbor, so edge order introduces ids monotonically
            for (int v = 2; v <= n; ++v) {
                const int r = (v - 1) / cols;
                const int c = (v - 1) % cols;
                if (c > 0) pairs.emplace_back(v - 1, v);
                if (r > 0) pairs.emplace_back(v - cols, v);
            }
            break;
        }
    }

    std::set<std::pair<int, int>> used(pairs.begin(), pairs.end());
    std::uniform_int_distribution<int> vertex_dist(1, n);
    int added = 0;
    int guard = 0;
    while (added < extra_loop_closures) {
        if (++guard > 1000 * (extra_loop_closures + 1))
            throw std::invalid_argument("could not place requested loop closures");
        const int i = vertex_dist(rng);
        const int j = vertex_dist(rng);
        if (i == j || used.contains({i, j})) continue;
        used.insert({i, j});
        pairs.emplace_back(i, j);
        ++added;
    }

    std::vector<PoseGraphEdge> edges;
    edges.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        UnitDualQuaterniond q = poses[static_cast<std::size_t>(i - 1)].conjugate() *
                                poses[static_cast<std::size_t>(j - 1)];
        if (noise.rot_sigma > 0 || noise.trans_sigma > 0) q = q * noise_dq(rng, noise);
        edges.push_back({i, j, q});
    }
    return {PoseGraph(n, std::move(edges)), std::move(truth), seed};
}

}  // namespace motopt
