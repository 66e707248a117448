#pragma once

#include "motopt/residual.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace motopt {

/// Parse failure with the 1-based line it occurred on (0 for file-level
/// problems such as an empty graph).
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// One pose as stored in files: translation plus quaternion in file order
/// qx qy qz qw (scalar last). Ingest normalizes the quaternion; deviations
/// beyond 1e-3 are rejected as corruption.
struct PoseRecord {
    long long id = 0;
    Vec3d t = Vec3d::Zero();
    Vec4d q_xyzw = Vec4d::Zero();
};

/// PoseRecord -> unit dual quaternion, reordering to scalar-first and taking
/// the file translation as the vector part of the dual construction
/// dual = (1/2) q [0, t].
UnitDualQuaterniond pose_record_to_dq(const PoseRecord& record);

struct ParsedPoseGraph {
    PoseGraph graph;
    /// Present iff every vertex in the file carries a VERTEX_SE3:QUAT line.
    std::optional<MotionVectord> initial_guess;
    /// Number of edges that carried a 21-value information-matrix block
    /// (accepted and ignored; sigma is the only weight in this formulation).
    int information_blocks = 0;
};

/// Line-oriented g2o-flavored text:
///   VERTEX_SE3:QUAT id tx ty tz qx qy qz qw
///   EDGE_SE3:QUAT i j tx ty tz qx qy qz qw [21 information values, ignored]
/// Blank lines and '#' comments are skipped. Vertex ids are remapped to
/// contiguous 1..n in first-appearance order. Malformed input raises
/// ParseError with the offending line; the parser never crashes.
ParsedPoseGraph parse_pose_graph(std::string_view text);

/// Inverse of parse_pose_graph: vertices (when poses are given) then edges,
/// ids 1..n, 17 significant digits, '\n' line endings, deterministic order.
std::string write_pose_graph(const PoseGraph& graph, const MotionVectord* poses = nullptr);

/// Hand-eye measurement text: lines `A tx ty tz qx qy qz qw` and
/// `B tx ty tz qx qy qz qw`; the i-th A pairs with the i-th B. Unmatched
/// records raise ParseError.
HandEyeDataset parse_handeye(std::string_view text);

std::string write_handeye(const HandEyeDataset& dataset);

/// Motion-vector text: one motion per line as `r1 r2 r3 t1 t2 t3`;
/// '#' comments and blank lines skipped.
MotionVectord parse_motions(std::string_view text);

std::string write_motions(const MotionVectord& motions);

}  // namespace motopt
