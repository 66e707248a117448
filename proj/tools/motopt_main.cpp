#include "motopt/graphio.hpp"
#include "motopt/solver.hpp"
#include "motopt/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace {

using namespace motopt;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoConvergence = 2;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

struct GenConfig {
    std::string problem;  // handeye | slam
    int model = 1;
    int m = 10;
    int n = 10;
    std::string topology = "cycle";
    int loops = 0;
    std::uint64_t seed = 0;
    double rot_noise = 0.0;
    double trans_noise = 0.0;
    double max_angle = kDefaultMaxAngle;
    double max_trans = kDefaultMaxTrans;
    std::string out;
    std::string truth;
};

int run_gen(const GenConfig& cfg) {
    const NoiseSpec noise(cfg.rot_noise, cfg.trans_noise);
    std::cout << "config: gen " << cfg.problem << " seed=" << cfg.seed
              << " rot_noise=" << cfg.rot_noise << " trans_noise=" << cfg.trans_noise
              << " max_angle=" << cfg.max_angle << " max_trans=" << cfg.max_trans;

    std::string instance_text;
    std::string truth_text;
    if (cfg.problem == "handeye") {
        std::cout << " model=" << cfg.model << " m=" << cfg.m << "\n";
        const HandEyeInstance inst =
            gen_handeye(cfg.seed, cfg.m,
                        cfg.model == 1 ? HandEyeModel::one_unknown : HandEyeModel::two_unknown,
                        noise, cfg.max_angle, cfg.max_trans);
        instance_text = write_handeye(inst.data);
        truth_text = write_motions(inst.ground_truth);
    } else {
        std::cout << " n=" << cfg.n << " topology=" << cfg.topology << " loops=" << cfg.loops
                  << "\n";
        const GraphTopology topo = cfg.topology == "chain"   ? GraphTopology::chain
                                   : cfg.topology == "cycle" ? GraphTopology::cycle
                                                             : GraphTopology::grid;
        const PoseGraphInstance inst = gen_pose_graph(cfg.seed, cfg.n, topo, cfg.loops, noise,
                                                      cfg.max_angle, cfg.max_trans);
        instance_text = write_pose_graph(inst.graph);
        truth_text = write_motions(inst.ground_truth);
    }
    write_file(cfg.out, instance_text);
    std::cout << "wrote " << cfg.out << "\n";
    if (!cfg.truth.empty()) {
        write_file(cfg.truth, truth_text);
        std::cout << "wrote " << cfg.truth << "\n";
    }
    return kExitOk;
}

struct SolveConfig {
    std::string problem;  // handeye | slam
    std::string in;
    int model = 1;
    double sigma = 1.0;
    std::string x0 = "zero";  // zero | file | spanning-tree
    std::string x0_file;
    std::string report;
    bool eval_only = false;
    SolverOptions options;
};

void write_report(const std::string& path, const SolveConfig& cfg, const SolveReport& report,
                  const MotionVectord& full_x, double wall_time_sec) {
    std::string out;
    out += "command=solve\n";
    out += "problem=" + cfg.problem + "\n";
    out += "input=" + cfg.in + "\n";
    out += "sigma=" + fmt(cfg.sigma) + "\n";
    out += "x0=" + cfg.x0 + "\n";
    out += "max_iterations=" + std::to_string(cfg.options.max_iterations) + "\n";
    out += "grad_tol=" + fmt(cfg.options.grad_tol) + "\n";
    out += "step_tol=" + fmt(cfg.options.step_tol) + "\n";
    out += "objective_tol=" + fmt(cfg.options.objective_tol) + "\n";
    out += "lambda_init=" + fmt(cfg.options.lambda_init) + "\n";
    out += "fd_step=" + fmt(cfg.options.fd_step) + "\n";
    out += "final_objective=" + fmt(report.final_objective) + "\n";
    out += "iterations=" + std::to_string(report.iterations) + "\n";
    out += "converged=" + to_string(report.converged) + "\n";
    out += "restarts_used=" + std::to_string(report.restarts_used) + "\n";
    out += "wall_time_sec=" + fmt(wall_time_sec) + "\n";
    out += "n=" + std::to_string(full_x.size()) + "\n";
    for (std::size_t i = 0; i < full_x.size(); ++i) {
        const Vec6d v = full_x[i].to_vector();
        out += "x_" + std::to_string(i + 1) + "=";
        for (int k = 0; k < 6; ++k) {
            if (k) out += ' ';
            out += fmt(v[k]);
        }
        out += '\n';
    }
    write_file(path, out);
}

int run_solve(const SolveConfig& cfg) {
    std::cout << "config: solve " << cfg.problem << " in=" << cfg.in << " sigma=" << cfg.sigma
              << " x0=" << cfg.x0 << " max_iter=" << cfg.options.max_iterations
              << " grad_tol=" << cfg.options.grad_tol << " step_tol=" << cfg.options.step_tol
              << " obj_tol=" << cfg.options.objective_tol
              << " lambda_init=" << cfg.options.lambda_init << " fd_step=" << cfg.options.fd_step
              << " seed=" << cfg.options.seed << "\n";

    const std::string text = read_file(cfg.in);
    const MetricWeights weights(cfg.sigma);

    std::optional<ResidualProblem> problem;
    std::optional<MotionVectord> x0_full;  // for slam, full pose vector before gauge stripping
    const bool slam = cfg.problem == "slam";

    if (slam) {
        const ParsedPoseGraph parsed = parse_pose_graph(text);
        if (parsed.information_blocks > 0)
            std::cout << "note: ignored " << parsed.information_blocks
                      << " information-matrix block(s); sigma is the only weighting\n";
        problem = slam_problem(parsed.graph, /*gauge_fix=*/true, weights);
        if (cfg.x0 == "spanning-tree") {
            x0_full = spanning_tree_init(parsed.graph);
        } else if (cfg.x0 == "file") {
            MotionVectord poses = parse_motions(read_file(cfg.x0_file));
            if (static_cast<int>(poses.size()) != parsed.graph.vertex_count())
                throw std::runtime_error("x0 file pose count does not match the graph");
            // align into the gauge of vertex 1; residuals are gauge invariant
            const UnitDualQuaterniond g = motion_to_dq(poses[0]).inverse();
            for (Motiond& m : poses) m = dq_to_motion(g * motion_to_dq(m));
            x0_full = std::move(poses);
        } else {
            x0_full = MotionVectord(static_cast<std::size_t>(parsed.graph.vertex_count()));
        }
    } else {
        const HandEyeDataset dataset = parse_handeye(text);
        problem = cfg.model == 1 ? handeye_one_unknown(dataset, weights)
                                 : handeye_two_unknown(dataset, weights);
        if (cfg.x0 == "file") {
            const MotionVectord x = parse_motions(read_file(cfg.x0_file));
            if (static_cast<int>(x.size()) != problem->free_count())
                throw std::runtime_error("x0 file motion count does not match the model");
            x0_full = x;
        } else if (cfg.x0 == "spanning-tree") {
            throw std::runtime_error("spanning-tree initialization applies to slam only");
        } else {
            x0_full = MotionVectord(static_cast<std::size_t>(problem->free_count()));
        }
    }

    const MotionVectord x0 = slam ? problem->extract_free(*x0_full) : *x0_full;

    if (cfg.eval_only) {
        const double value = objective(*problem, x0);
        std::cout << "objective=" << fmt(value) << "\n";
        return kExitOk;
    }

    const auto start = std::chrono::steady_clock::now();
    const SolveReport report = levenberg_marquardt(*problem, x0, cfg.options);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const MotionVectord full = slam ? problem->embed(report.final_x) : report.final_x;
    std::cout << "final_objective=" << fmt(report.final_objective) << "\n";
    std::cout << "iterations=" << report.iterations << "\n";
    std::cout << "converged=" << to_string(report.converged) << "\n";
    std::cout << "wall_time_sec=" << fmt(wall) << "\n";
    if (!cfg.report.empty()) write_report(cfg.report, cfg, report, full, wall);

    return report.converged == ConvergenceReason::max_iter ? kExitNoConvergence : kExitOk;
}

struct CheckLine {
    std::string name;
    double max_err;
    double tol;
};

int run_check(int samples, std::uint64_t seed) {
    constexpr double kPi = std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto rand_axis = [&] {
        Vec3d v;
        do {
            for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
        } while (v.norm() < 1e-12);
        return Vec3d(v.normalized());
    };
    auto rand_vec = [&](double s) {
        return Vec3d(s * (2 * unit(rng) - 1), s * (2 * unit(rng) - 1), s * (2 * unit(rng) - 1));
    };
    auto rand_unit_quat = [&] {
        Vec4d v;
        do {
            for (int i = 0; i < 4; ++i) v[i] = gauss(rng);
        } while (v.norm() < 1e-6);
        return UnitQuaterniond(Quaterniond(Vec4d(v.normalized())));
    };

    std::vector<CheckLine> lines;
    auto record = [&lines](const std::string& name, double err, double tol) {
        lines.push_back({name, err, tol});
    };

    double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    for (int i = 0; i < samples; ++i) {
        const Vec3d r = unit(rng) * (2 * kPi - 1e-6) * rand_axis();
        e1 = std::max(e1, (quat_to_rotation(rotation_to_quat(r)) - r).cwiseAbs().maxCoeff());

        UnitQuaterniond q = rand_unit_quat();
        if (q.real() <= -1 + 1e-12) q = -q;
        e2 = std::max(e2, (rotation_to_quat(quat_to_rotation(q)).quat().coeffs() -
                           q.quat().coeffs())
                              .cwiseAbs()
                              .maxCoeff());

        const Motiond x(unit(rng) * (kPi - 1e-6) * rand_axis(), rand_vec(2.0));
        const Motiond back = dq_to_motion(motion_to_dq(x));
        e3 = std::max(e3, (back.to_vector() - x.to_vector()).cwiseAbs().maxCoeff());

        const UnitDualQuaterniond dq = dq_from_parts(rand_unit_quat(), rand_vec(2.0));
        const UnitDualQuaterniond round = motion_to_dq(dq_to_motion(dq));
        const UnitDualQuaterniond canon = canonical(dq);
        e4 = std::max(e4,
                      std::max((round.standard().coeffs() - canon.standard().coeffs())
                                   .cwiseAbs()
                                   .maxCoeff(),
                               (round.dual().coeffs() - canon.dual().coeffs())
                                   .cwiseAbs()
                                   .maxCoeff()));
    }
    record("rotation_vector_round_trip", e1, 1e-10);
    record("unit_quaternion_round_trip", e2, 1e-10);
    record("motion_round_trip", e3, 1e-10);
    record("unit_dual_quaternion_round_trip", e4, 1e-10);

    double e5 = std::max({quat_to_rotation(UnitQuaterniond::identity()).cwiseAbs().maxCoeff(),
                          (rotation_to_quat(Vec3d::Zero()).quat().coeffs() -
                           Quaterniond::identity().coeffs())
                              .cwiseAbs()
                              .maxCoeff(),
                          dq_to_motion(UnitDualQuaterniond::identity()).to_vector().cwiseAbs().maxCoeff()});
    const DualQuaterniond uhat0 = motion_to_dq(Motiond{}).dq();
    e5 = std::max({e5,
                   (uhat0.standard().coeffs() - Quaterniond::identity().coeffs())
                       .cwiseAbs()
                       .maxCoeff(),
                   uhat0.dual().coeffs().cwiseAbs().maxCoeff()});
    record("identity_maps_exact", e5, 0.0);

    double e6 = 0, e7 = 0, e7b = 0;
    for (int i = 0; i < samples; ++i) {
        const Vec3d r = unit(rng) * (2 * kPi - 0.1) * rand_axis();
        e6 = std::max(e6, (rotation_to_quat(-r).quat().coeffs() -
                           rotation_to_quat(r).inverse().quat().coeffs())
                              .cwiseAbs()
                              .maxCoeff());

        // inversion law: the inverse transform negates the rotation and
        // counter-rotates the translation
        const Motiond x(unit(rng) * 3.0 * rand_axis(), rand_vec(2.0));
        const UnitQuaterniond u = rotation_to_quat(x.r);
        const Vec3d rot_t = (u.quat() * Quaterniond::vector(x.t) * u.quat().conjugate()).imag();
        const DualQuaterniond lhs = motion_to_dq(Motiond(-x.r, -rot_t)).dq();
        const DualQuaterniond rhs = motion_to_dq(x).inverse().dq();
        e7 = std::max({e7,
                       (lhs.standard().coeffs() - rhs.standard().coeffs()).cwiseAbs().maxCoeff(),
                       (lhs.dual().coeffs() - rhs.dual().coeffs()).cwiseAbs().maxCoeff()});

        // componentwise negation inverts motions whose translation lies on the axis
        const Vec3d axis_r = unit(rng) * 3.0 * rand_axis();
        const Motiond ax(axis_r, Vec3d((2 * unit(rng) - 1) * axis_r));
        const DualQuaterniond nl = motion_to_dq(Motiond(-ax.r, -ax.t)).dq();
        const DualQuaterniond nr = motion_to_dq(ax).inverse().dq();
        e7b = std::max({e7b,
                        (nl.standard().coeffs() - nr.standard().coeffs()).cwiseAbs().maxCoeff(),
                        (nl.dual().coeffs() - nr.dual().coeffs()).cwiseAbs().maxCoeff()});
    }
    record("rotation_negation_inverse", e6, 1e-12);
    record("motion_inverse_law", e7, 1e-12);
    record("axis_translation_negation_inverse", e7b, 1e-12);

    // doubled rotation on both branches of the angle grid, with the
    // 2*pi-wrap that raw extraction exhibits above pi
    double e8 = 0;
    const double grid[] = {0.1, 1.0, kPi - 0.01, kPi + 0.01, 5.0, 2 * kPi - 0.1};
    for (const double theta : grid) {
        for (int rep = 0; rep < 8; ++rep) {
            const Vec3d l = rand_axis();
            const UnitQuaterniond q = rotation_to_quat(Vec3d(theta * l));
            const Vec3d raw = quat_to_rotation(UnitQuaterniond(q.quat() * q.quat()));
            const Vec3d predicted = theta < kPi ? Vec3d(2 * theta * l)
                                                : Vec3d((2 * (theta - kPi) - 2 * kPi) * l);
            e8 = std::max(e8, (raw - predicted).cwiseAbs().maxCoeff());
        }
    }
    record("doubled_rotation_branches", e8, 1e-9);

    double e9 = 0;
    for (int i = 0; i < samples; ++i) {
        Quaterniond p(2 * unit(rng) - 1, 2 * unit(rng) - 1, 2 * unit(rng) - 1, 2 * unit(rng) - 1);
        Quaterniond q(2 * unit(rng) - 1, 2 * unit(rng) - 1, 2 * unit(rng) - 1, 2 * unit(rng) - 1);
        e9 = std::max(e9, std::abs((p * q).norm() - p.norm() * q.norm()));
        e9 = std::max(e9, ((p * q).conjugate().coeffs() -
                           (q.conjugate() * p.conjugate()).coeffs())
                              .cwiseAbs()
                              .maxCoeff());
        e9 = std::max(e9,
                      (p * q.conjugate() + q * p.conjugate()).imag().cwiseAbs().maxCoeff());
        const UnitQuaterniond uq = rand_unit_quat();
        e9 = std::max(e9, (unit_square(uq).coeffs() - (uq.quat() * uq.quat()).coeffs())
                              .cwiseAbs()
                              .maxCoeff());
    }
    record("quaternion_algebra", e9, 1e-12);

    std::cout << "config: check samples=" << samples << " seed=" << seed << "\n";
    bool all_ok = true;
    for (const CheckLine& line : lines) {
        const bool ok = line.max_err <= line.tol;
        all_ok = all_ok && ok;
        std::printf("%-36s max_err=%-12.3e tol=%-8.0e %s\n", line.name.c_str(), line.max_err,
                    line.tol, ok ? "PASS" : "FAIL");
    }
    return all_ok ? kExitOk : kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motion-parametrized dual-quaternion calibration and pose-graph solver"};
    app.require_subcommand(1);

    GenConfig gen;
    SolveConfig solve;
    int check_samples = 10000;
    std::uint64_t check_seed = 1;

    CLI::App* gen_cmd = app.add_subcommand("gen", "generate synthetic instances");
    gen_cmd->require_subcommand(1);
    auto add_gen_common = [&gen](CLI::App* cmd) {
        cmd->add_option("--seed", gen.seed, "generator seed")->required();
        cmd->add_option("--rot-noise", gen.rot_noise, "rotation noise sigma (radians)");
        cmd->add_option("--trans-noise", gen.trans_noise, "translation noise sigma");
        cmd->add_option("--max-angle", gen.max_angle, "rotation angle cap");
        cmd->add_option("--max-trans", gen.max_trans, "translation bound");
        cmd->add_option("--out", gen.out, "instance output path")->required();
        cmd->add_option("--truth", gen.truth, "ground-truth motion output path");
    };
    CLI::App* gen_he = gen_cmd->add_subcommand("handeye", "hand-eye measurement pairs");
    gen_he->add_option("--model", gen.model, "1 = one unknown, 2 = two unknowns")
        ->check(CLI::IsMember({1, 2}));
    gen_he->add_option("--m", gen.m, "number of measurement pairs")->check(CLI::PositiveNumber);
    add_gen_common(gen_he);
    CLI::App* gen_slam = gen_cmd->add_subcommand("slam", "pose graph");
    gen_slam->add_option("--n", gen.n, "vertex count")->check(CLI::Range(2, 1000000));
    gen_slam->add_option("--topology", gen.topology, "chain | cycle | grid")
        ->check(CLI::IsMember({"chain", "cycle", "grid"}));
    gen_slam->add_option("--loops", gen.loops, "extra loop closures")
        ->check(CLI::NonNegativeNumber);
    add_gen_common(gen_slam);

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve an instance");
    solve_cmd->require_subcommand(1);
    auto add_solve_common = [&solve](CLI::App* cmd) {
        cmd->add_option("--in", solve.in, "instance path")->required();
        cmd->add_option("--sigma", solve.sigma, "translation weight sigma")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--x0", solve.x0, "zero | file | spanning-tree")
            ->check(CLI::IsMember({"zero", "file", "spanning-tree"}));
        cmd->add_option("--x0-file", solve.x0_file, "motion file for --x0 file");
        cmd->add_option("--report", solve.report, "machine-readable report path");
        cmd->add_flag("--eval-only", solve.eval_only, "evaluate the objective at x0 and exit");
        cmd->add_option("--max-iter", solve.options.max_iterations);
        cmd->add_option("--grad-tol", solve.options.grad_tol);
        cmd->add_option("--step-tol", solve.options.step_tol);
        cmd->add_option("--obj-tol", solve.options.objective_tol);
        cmd->add_option("--lambda-init", solve.options.lambda_init);
        cmd->add_option("--fd-step", solve.options.fd_step);
        cmd->add_option("--restarts", solve.options.max_restarts);
        cmd->add_option("--restart-seed", solve.options.seed);
    };
    CLI::App* solve_he = solve_cmd->add_subcommand("handeye", "hand-eye calibration");
    solve_he->add_option("--model", solve.model, "1 = one unknown, 2 = two unknowns")
        ->check(CLI::IsMember({1, 2}));
    add_solve_common(solve_he);
    CLI::App* solve_slam = solve_cmd->add_subcommand("slam", "pose-graph optimization");
    add_solve_common(solve_slam);

    CLI::App* check_cmd = app.add_subcommand("check", "run the operator self-test suite");
    check_cmd->add_option("--samples", check_samples, "sample count")->check(CLI::PositiveNumber);
    check_cmd->add_option("--seed", check_seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (gen_cmd->parsed()) {
            gen.problem = gen_he->parsed() ? "handeye" : "slam";
            return run_gen(gen);
        }
        if (solve_cmd->parsed()) {
            solve.problem = solve_he->parsed() ? "handeye" : "slam";
            solve.options.validate();
            if (solve.x0 == "file" && solve.x0_file.empty())
                throw std::runtime_error("--x0 file requires --x0-file");
            return run_solve(solve);
        }
        return run_check(check_samples, check_seed);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
