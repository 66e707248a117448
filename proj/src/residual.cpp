#include "motopt/residual.hpp"

#include <queue>
#include <utility>

namespace motopt {

ResidualProblem::ResidualProblem(int free_count, int residual_count, MetricWeights weights,
                                 Evaluator evaluator, std::map<int, Motiond> fixed)
    : free_count_(free_count),
      residual_count_(residual_count),
      weights_(weights),
      evaluator_(std::move(evaluator)),
      fixed_(std::move(fixed)) {
    if (free_count_ < 1) throw std::invalid_argument("residual problem needs at least one unknown");
    if (residual_count_ < 1) throw std::invalid_argument("residual problem needs at least one residual");
    if (!evaluator_) throw std::invalid_argument("residual problem needs an evaluator");
}

MotionVectord ResidualProblem::residuals(const MotionVectord& x) const {
    if (static_cast<int>(x.size()) != free_count_)
        throw std::invalid_argument("motion vector dimension does not match problem");
    MotionVectord z = evaluator_(x);
    if (static_cast<int>(z.size()) != residual_count_)
        throw std::logic_error("evaluator produced wrong residual count");
    return z;
}

MotionVectord ResidualProblem::embed(const MotionVectord& free) const {
    if (static_cast<int>(free.size()) != free_count_)
        throw std::invalid_argument("free vector dimension does not match problem");
    MotionVectord full(full_count());
    std::size_t next_free = 0;
    for (int i = 0; i < full_count(); ++i) {
        auto it = fixed_.find(i);
        full[static_cast<std::size_t>(i)] = it != fixed_.end() ? it->second : free[next_free++];
    }
    return full;
}

MotionVectord ResidualProblem::extract_free(const MotionVectord& full) const {
    if (static_cast<int>(full.size()) != full_count())
        throw std::invalid_argument("full vector dimension does not match problem");
    MotionVectord free;
    free.reserve(static_cast<std::size_t>(free_count_));
    for (int i = 0; i < full_count(); ++i)
        if (!fixed_.contains(i)) free.push_back(full[static_cast<std::size_t>(i)]);
    return free;
}

double objective(const ResidualProblem& problem, const MotionVectord& x) {
    const double norm = motion_vector_norm(problem.residuals(x), problem.weights());
    return 0.5 * norm * norm;
}

ResidualProblem handeye_one_unknown(const HandEyeDataset& dataset, MetricWeights weights) {
    auto eval = [dataset](const MotionVectord& x) {
        const UnitDualQuaterniond q = motion_to_dq(x[0]);
        MotionVectord z;
        z.reserve(dataset.pairs().size());
        for (const HandEyePair& pair : dataset.pairs())
            z.push_back(dq_to_motion(pair.a * q * (q * pair.b).inverse()));
        return z;
    };
    return ResidualProblem(1, dataset.size(), weights, std::move(eval));
}

ResidualProblem handeye_two_unknown(const HandEyeDataset& dataset, MetricWeights weights) {
    auto eval = [dataset](const MotionVectord& x) {
        const UnitDualQuaterniond q = motion_to_dq(x[0]);
        const UnitDualQuaterniond p = motion_to_dq(x[1]);
        MotionVectord z;
        z.reserve(dataset.pairs().size());
        for (const HandEyePair& pair : dataset.pairs())
            z.push_back(dq_to_motion(pair.a * q * (p * pair.b).inverse()));
        return z;
    };
    return ResidualProblem(2, dataset.size(), weights, std::move(eval));
}

ResidualProblem slam_problem(const PoseGraph& graph, bool gauge_fix, MetricWeights weights) {
    const int n = graph.vertex_count();
    if (gauge_fix && n < 2)
        throw std::invalid_argument("gauge-fixed pose graph needs at least two vertices");

    std::map<int, Motiond> fixed;
    if (gauge_fix) fixed.emplace(0, Motiond{});

    auto eval = [graph, gauge_fix](const MotionVectord& x) {
        MotionVectord full;
        if (gauge_fix) {
            full.reserve(x.size() + 1);
            full.push_back(Motiond{});
            full.insert(full.end(), x.begin(), x.end());
        } else {
            full = x;
        }
        std::vector<UnitDualQuaterniond> poses;
        poses.reserve(full.size());
        for (const Motiond& m : full) poses.push_back(motion_to_dq(m));
        MotionVectord z;
        z.reserve(graph.edges().size());
        for (const PoseGraphEdge& e : graph.edges()) {
            const UnitDualQuaterniond& pi = poses[static_cast<std::size_t>(e.i - 1)];
            const UnitDualQuaterniond& pj = poses[static_cast<std::size_t>(e.j - 1)];
            z.push_back(dq_to_motion(pi.conjugate() * pj * e.q.inverse()));
        }
        return z;
    };
    return ResidualProblem(gauge_fix ? n - 1 : n, graph.edge_count(), weights, std::move(eval),
                           std::move(fixed));
}

MotionVectord spanning_tree_init(const PoseGraph& graph) {
    const int n = graph.vertex_count();
    std::vector<UnitDualQuaterniond> poses(static_cast<std::size_t>(n),
                                           UnitDualQuaterniond::identity());
    std::vector<bool> visited(static_cast<std::size_t>(n), false);

    // Undirected adjacency; edge direction only affects composition.
    std::vector<std::vector<std::pair<int, const PoseGraphEdge*>>> adj(
        static_cast<std::size_t>(n));
    for (const PoseGraphEdge& e : graph.edges()) {
        adj[static_cast<std::size_t>(e.i - 1)].emplace_back(e.j - 1, &e);
        adj[static_cast<std::size_t>(e.j - 1)].emplace_back(e.i - 1, &e);
    }

    std::queue<int> frontier;
    frontier.push(0);
    visited[0] = true;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& [v, e] : adj[static_cast<std::size_t>(u)]) {
            if (visited[static_cast<std::size_t>(v)]) continue;
            visited[static_cast<std::size_t>(v)] = true;
            // q_ij = p_i^* p_j, so p_j = p_i q_ij and p_i = p_j q_ij^-1.
            poses[static_cast<std::size_t>(v)] =
                e->i - 1 == u ? poses[static_cast<std::size_t>(u)] * e->q
                              : poses[static_cast<std::size_t>(u)] * e->q.inverse();
            frontier.push(v);
        }
    }

    MotionVectord out;
    out.reserve(static_cast<std::size_t>(n));
    for (const UnitDualQuaterniond& p : poses) out.push_back(dq_to_motion(p));
    return out;
}

}  // namespace motopt
