#pragma once

#include "motopt/motion.hpp"

#include <functional>
#include <map>
#include <vector>

namespace motopt {

/// One measurement pair of the hand-eye equations a q = q b (one unknown)
/// or a q = p b (two unknowns).
struct HandEyePair {
    UnitDualQuaterniond a;
    UnitDualQuaterniond b;
};

/// Ordered measurement pairs; at least one required.
class HandEyeDataset {
public:
    explicit HandEyeDataset(std::vector<HandEyePair> pairs) : pairs_(std::move(pairs)) {
        if (pairs_.empty()) throw std::invalid_argument("hand-eye dataset needs at least one pair");
    }

    const std::vector<HandEyePair>& pairs() const { return pairs_; }
    int size() const { return static_cast<int>(pairs_.size()); }

private:
    std::vector<HandEyePair> pairs_;
};

/// Directed relative-pose measurement between vertices i and j (1-based).
struct PoseGraphEdge {
    int i = 0;
    int j = 0;
    UnitDualQuaterniond q;
};

/// Directed graph of relative pose measurements over n vertices.
class PoseGraph {
public:
    PoseGraph(int vertex_count, std::vector<PoseGraphEdge> edges)
        : n_(vertex_count), edges_(std::move(edges)) {
        if (n_ < 1) throw std::invalid_argument("pose graph needs at least one vertex");
        if (edges_.empty()) throw std::invalid_argument("pose graph needs at least one edge");
        for (const PoseGraphEdge& e : edges_) {
            if (e.i < 1 || e.i > n_ || e.j < 1 || e.j > n_)
                throw std::invalid_argument("pose graph edge references vertex out of range");
            if (e.i == e.j) throw std::invalid_argument("pose graph edge must join distinct vertices");
        }
    }

    int vertex_count() const { return n_; }
    const std::vector<PoseGraphEdge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

private:
    int n_;
    std::vector<PoseGraphEdge> edges_;
};

/// Residual map z : M^n -> M^m with objective (1/2) ||z(x)||^2. The evaluator
/// receives the free components only; gauge-fixed components are re-inserted
/// internally. Evaluation is deterministic and side-effect free; the i-th
/// output never depends on evaluation order.
class ResidualProblem {
public:
    using Evaluator = std::function<MotionVectord(const MotionVectord&)>;

    ResidualProblem(int free_count, int residual_count, MetricWeights weights, Evaluator evaluator,
                    std::map<int, Motiond> fixed = {});

    int free_count() const { return free_count_; }
    int residual_count() const { return residual_count_; }
    int full_count() const { return free_count_ + static_cast<int>(fixed_.size()); }
    const MetricWeights& weights() const { return weights_; }
    const std::map<int, Motiond>& fixed_components() const { return fixed_; }

    /// Residual motions at the free vector x (length free_count).
    MotionVectord residuals(const MotionVectord& x) const;

    /// Re-insert fixed components: free vector -> full vector.
    MotionVectord embed(const MotionVectord& free) const;
    /// Drop fixed components: full vector -> free vector.
    MotionVectord extract_free(const MotionVectord& full) const;

private:
    int free_count_;
    int residual_count_;
    MetricWeights weights_;
    Evaluator evaluator_;
    std::map<int, Motiond> fixed_;
};

/// (1/2) ||z(x)||^2 under the problem's metric weights.
double objective(const ResidualProblem& problem, const MotionVectord& x);

/// Hand-eye model with one unknown q: z_i(x) = M(a_i U(x) (U(x) b_i)^-1).
/// 6-dimensional unconstrained problem.
ResidualProblem handeye_one_unknown(const HandEyeDataset& dataset, MetricWeights weights = {});

/// Hand-eye model with unknowns q = U(x1), p = U(x2):
/// z_i = M(a_i U(x1) (U(x2) b_i)^-1). 12-dimensional unconstrained problem.
ResidualProblem handeye_two_unknown(const HandEyeDataset& dataset, MetricWeights weights = {});

/// Pose-graph problem: one residual z_ij = M(p_i^* p_j q_ij^-1) per edge, in
/// edge order. With gauge_fix (default) pose 1 is pinned to the identity and
/// excluded from the unknowns; without it the problem keeps a 6-dimensional
/// flat manifold of minimizers.
ResidualProblem slam_problem(const PoseGraph& graph, bool gauge_fix = true,
                             MetricWeights weights = {});

/// Initial poses composed along a BFS spanning tree from vertex 1 (the gauge
/// vertex); unreachable vertices start at the identity. Returns the full
/// vector of vertex_count motions.
MotionVectord spanning_tree_init(const PoseGraph& graph);

}  // namespace motopt
