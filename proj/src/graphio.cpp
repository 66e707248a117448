#include "motopt/graphio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace motopt {

namespace {

constexpr double kQuatDeviationLimit = 1e-3;

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

double parse_double(const std::string& token, int line) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + token.size() || token.empty())
        throw ParseError(line, "expected a number, got '" + token + "'");
    if (!std::isfinite(value)) throw ParseError(line, "non-finite number '" + token + "'");
    return value;
}

long long parse_id(const std::string& token, int line) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const long long value = std::strtoll(begin, &end, 10);
    if (end != begin + token.size() || token.empty())
        throw ParseError(line, "expected an integer id, got '" + token + "'");
    return value;
}

/// Reads `t q_xyzw` from tokens[offset..offset+6].
PoseRecord read_pose_fields(const std::vector<std::string>& tokens, std::size_t offset, int line) {
    PoseRecord rec;
    for (int k = 0; k < 3; ++k) rec.t[k] = parse_double(tokens[offset + static_cast<std::size_t>(k)], line);
    for (int k = 0; k < 4; ++k)
        rec.q_xyzw[k] = parse_double(tokens[offset + 3 + static_cast<std::size_t>(k)], line);
    const double deviation = std::abs(rec.q_xyzw.norm() - 1.0);
    if (deviation > kQuatDeviationLimit)
        throw ParseError(line, "quaternion magnitude off unit by more than 1e-3");
    rec.q_xyzw.normalize();
    return rec;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_pose_fields(std::string& out, const UnitDualQuaterniond& q) {
    const Vec3d t = translation_vector(q);
    const Quaterniond& s = q.standard();
    for (int k = 0; k < 3; ++k) {
        out += ' ';
        out += fmt(t[k]);
    }
    // scalar-last file order
    out += ' ';
    out += fmt(s[1]);
    out += ' ';
    out += fmt(s[2]);
    out += ' ';
    out += fmt(s[3]);
    out += ' ';
    out += fmt(s[0]);
}

struct Line {
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++number;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        const std::size_t hash = raw.find('#');
        const std::string_view body = raw.substr(0, hash);
        std::vector<std::string> tokens = tokenize(body);
        if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
    }
    return lines;
}

}  // namespace

UnitDualQuaterniond pose_record_to_dq(const PoseRecord& record) {
    const Quaterniond scalar_first(record.q_xyzw[3], record.q_xyzw[0], record.q_xyzw[1],
                                   record.q_xyzw[2]);
    return dq_from_parts(UnitQuaterniond::normalize(scalar_first), record.t);
}

ParsedPoseGraph parse_pose_graph(std::string_view text) {
    std::map<long long, int> id_map;  // original id -> contiguous 1-based id
    auto remap = [&id_map](long long id) {
        return id_map.emplace(id, static_cast<int>(id_map.size()) + 1).first->second;
    };

    std::map<int, UnitDualQuaterniond> vertex_poses;
    std::set<std::pair<long long, long long>> seen_edges;
    struct RawEdge {
        int i, j;
        UnitDualQuaterniond q;
    };
    std::vector<RawEdge> edges;
    int information_blocks = 0;

    for (const Line& line : content_lines(text)) {
        const std::vector<std::string>& tok = line.tokens;
        if (tok[0] == "VERTEX_SE3:QUAT") {
            if (tok.size() != 9)
                throw ParseError(line.number, "VERTEX_SE3:QUAT expects 8 fields, got " +
                                                  std::to_string(tok.size() - 1));
            PoseRecord rec = read_pose_fields(tok, 2, line.number);
            rec.id = parse_id(tok[1], line.number);
            const int id = remap(rec.id);
            if (vertex_poses.contains(id))
                throw ParseError(line.number, "duplicate vertex id " + tok[1]);
            vertex_poses.emplace(id, pose_record_to_dq(rec));
        } else if (tok[0] == "EDGE_SE3:QUAT") {
            if (tok.size() != 10 && tok.size() != 31)
                throw ParseError(line.number,
                                 "EDGE_SE3:QUAT expects 9 fields plus an optional 21-value "
                                 "information block, got " +
                                     std::to_string(tok.size() - 1));
            const long long raw_i = parse_id(tok[1], line.number);
            const long long raw_j = parse_id(tok[2], line.number);
            if (raw_i == raw_j)
                throw ParseError(line.number, "edge must join distinct vertices");
            if (!seen_edges.emplace(raw_i, raw_j).second)
                throw ParseError(line.number,
                                 "duplicate edge (" + tok[1] + ", " + tok[2] + ")");
            const PoseRecord rec = read_pose_fields(tok, 3, line.number);
            if (tok.size() == 31) {
                for (std::size_t k = 10; k < 31; ++k) parse_double(tok[k], line.number);
                ++information_blocks;
            }
            edges.push_back({remap(raw_i), remap(raw_j), pose_record_to_dq(rec)});
        } else {
            throw ParseError(line.number, "unknown tag '" + tok[0] + "'");
        }
    }

    if (edges.empty()) throw ParseError(0, "pose graph has no edges");
    const int n = static_cast<int>(id_map.size());

    std::vector<PoseGraphEdge> graph_edges;
    graph_edges.reserve(edges.size());
    for (const RawEdge& e : edges) graph_edges.push_back({e.i, e.j, e.q});

    std::optional<MotionVectord> guess;
    if (static_cast<int>(vertex_poses.size()) == n) {
        MotionVectord g;
        g.reserve(static_cast<std::size_t>(n));
        for (int id = 1; id <= n; ++id) g.push_back(dq_to_motion(vertex_poses.at(id)));
        guess = std::move(g);
    }

    return {PoseGraph(n, std::move(graph_edges)), std::move(guess), information_blocks};
}

std::string write_pose_graph(const PoseGraph& graph, const MotionVectord* poses) {
    if (poses && static_cast<int>(poses->size()) != graph.vertex_count())
        throw std::invalid_argument("pose count does not match graph vertex count");
    std::string out;
    if (poses) {
        for (int id = 1; id <= graph.vertex_count(); ++id) {
            out += "VERTEX_SE3:QUAT ";
            out += std::to_string(id);
            append_pose_fields(out, motion_to_dq((*poses)[static_cast<std::size_t>(id - 1)]));
            out += '\n';
        }
    }
    for (const PoseGraphEdge& e : graph.edges()) {
        out += "EDGE_SE3:QUAT ";
        out += std::to_string(e.i);
        out += ' ';
        out += std::to_string(e.j);
        append_pose_fields(out, e.q);
        out += '\n';
    }
    return out;
}

HandEyeDataset parse_handeye(std::string_view text) {
    struct Rec {
        int line;
        UnitDualQuaterniond q;
    };
    std::vector<Rec> as, bs;
    for (const Line& line : content_lines(text)) {
        const std::vector<std::string>& tok = line.tokens;
        if (tok[0] != "A" && tok[0] != "B")
            throw ParseError(line.number, "unknown tag '" + tok[0] + "'");
        if (tok.size() != 8)
            throw ParseError(line.number, std::string(tok[0]) + " expects 7 fields, got " +
                                              std::to_string(tok.size() - 1));
        const PoseRecord rec = read_pose_fields(tok, 1, line.number);
        (tok[0] == "A" ? as : bs).push_back({line.number, pose_record_to_dq(rec)});
    }
    if (as.size() != bs.size()) {
        const std::vector<Rec>& longer = as.size() > bs.size() ? as : bs;
        throw ParseError(longer[std::min(as.size(), bs.size())].line,
                         as.size() > bs.size() ? "A record without matching B"
                                               : "B record without matching A");
    }
    if (as.empty()) throw ParseError(0, "hand-eye dataset has no measurement pairs");
    std::vector<HandEyePair> pairs;
    pairs.reserve(as.size());
    for (std::size_t i = 0; i < as.size(); ++i) pairs.push_back({as[i].q, bs[i].q});
    return HandEyeDataset(std::move(pairs));
}

std::string write_handeye(const HandEyeDataset& dataset) {
    std::string out;
    for (const HandEyePair& pair : dataset.pairs()) {
        out += "A";
        append_pose_fields(out, pair.a);
        out += "\nB";
        append_pose_fields(out, pair.b);
        out += '\n';
    }
    return out;
}

MotionVectord parse_motions(std::string_view text) {
    MotionVectord out;
    for (const Line& line : content_lines(text)) {
        if (line.tokens.size() != 6)
            throw ParseError(line.number, "motion line expects 6 fields, got " +
                                              std::to_string(line.tokens.size()));
        Vec6d v;
        for (int k = 0; k < 6; ++k) v[k] = parse_double(line.tokens[static_cast<std::size_t>(k)], line.number);
        out.emplace_back(v);
    }
    if (out.empty()) throw ParseError(0, "motion file has no entries");
    return out;
}

std::string write_motions(const MotionVectord& motions) {
    std::string out;
    for (const Motiond& m : motions) {
        const Vec6d v = m.to_vector();
        for (int k = 0; k < 6; ++k) {
            if (k) out += ' ';
            out += fmt(v[k]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace motopt
