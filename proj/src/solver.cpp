#include "motopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace motopt {

namespace {

constexpr double kLambdaMax = 1e12;
constexpr int kMaxRejectsPerIteration = 50;

double objective_of(const VecXd& weighted) { return 0.5 * weighted.squaredNorm(); }

}  // namespace

void SolverOptions::validate() const {
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
    if (!(grad_tol > 0) || !(step_tol > 0) || !(objective_tol > 0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (!(lambda_init > 0) || !(fd_step > 0))
        throw std::invalid_argument("lambda_init and fd_step must be positive");
    if (!(lambda_up > 1.0)) throw std::invalid_argument("lambda_up must exceed 1");
    if (!(lambda_down > 0.0) || !(lambda_down < 1.0))
        throw std::invalid_argument("lambda_down must lie in (0, 1)");
    if (max_restarts < 0) throw std::invalid_argument("max_restarts must be nonnegative");
}

std::string to_string(ConvergenceReason reason) {
    switch (reason) {
        case ConvergenceReason::gradient: return "gradient";
        case ConvergenceReason::step: return "step";
        case ConvergenceReason::objective: return "objective";
        case ConvergenceReason::max_iter: return "max_iter";
    }
    return "unknown";
}

VecXd weighted_residuals(const ResidualProblem& problem, const MotionVectord& x) {
    const MotionVectord z = problem.residuals(x);
    const double rt_sigma = std::sqrt(problem.weights().sigma);
    VecXd out(6 * static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.segment<3>(6 * static_cast<Eigen::Index>(i)) = z[i].r;
        out.segment<3>(6 * static_cast<Eigen::Index>(i) + 3) = rt_sigma * z[i].t;
    }
    return out;
}

Eigen::MatrixXd numeric_jacobian(const ResidualProblem& problem, const MotionVectord& x, double h,
                                 FdScheme scheme) {
    if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
    const Eigen::Index cols = 6 * problem.free_count();
    const Eigen::Index rows = 6 * problem.residual_count();
    const VecXd x_flat = flatten(x);
    const std::size_t n = x.size();

    auto probe = [&](const VecXd& p, int k) {
        VecXd w = weighted_residuals(problem, unflatten(p, n));
        if (!w.allFinite())
            throw EvaluationError(k, "non-finite residual while probing coordinate " +
                                         std::to_string(k));
        return w;
    };

    const VecXd base = scheme == FdScheme::forward ? probe(x_flat, -1) : VecXd();
    Eigen::MatrixXd jac(rows, cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
        VecXd plus = x_flat;
        plus[k] += h;
        if (scheme == FdScheme::central) {
            VecXd minus = x_flat;
            minus[k] -= h;
            jac.col(k) = (probe(plus, static_cast<int>(k)) - probe(minus, static_cast<int>(k))) /
                         (2.0 * h);
        } else {
            jac.col(k) = (probe(plus, static_cast<int>(k)) - base) / h;
        }
    }
    return jac;
}

namespace {

SolveReport lm_single_run(const ResidualProblem& problem, const MotionVectord& x0,
                          const SolverOptions& opts) {
    MotionVectord x = x0;
    VecXd w = weighted_residuals(problem, x);
    double f = objective_of(w);
    if (!std::isfinite(f)) throw std::invalid_argument("objective not finite at starting point");

    SolveReport report;
    report.trace.push_back(f);
    double lambda = opts.lambda_init;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (f <= opts.objective_tol) {
            report.converged = ConvergenceReason::objective;
            break;
        }
        const Eigen::MatrixXd jac = numeric_jacobian(problem, x, opts.fd_step);
        const VecXd grad = jac.transpose() * w;
        if (grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
            report.converged = ConvergenceReason::gradient;
            break;
        }
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const VecXd x_flat = flatten(x);

        bool accepted = false;
        bool tolerance_hit = false;
        for (int reject = 0; reject <= kMaxRejectsPerIteration && lambda <= kLambdaMax; ++reject) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal().array() += lambda;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            VecXd step;
            bool solve_ok = ldlt.info() == Eigen::Success;
            if (solve_ok) {
                step = ldlt.solve(-grad);
                solve_ok = step.allFinite();
            }
            if (!solve_ok) {
                lambda *= opts.lambda_up;
                continue;
            }

            const MotionVectord x_try = unflatten(VecXd(x_flat + step), x.size());
            VecXd w_try;
            double f_try = std::numeric_limits<double>::infinity();
            try {
                w_try = weighted_residuals(problem, x_try);
                f_try = objective_of(w_try);
            } catch (const std::invalid_argument&) {
                // Non-finite trial point; treat as a rejected step.
            }
            if (std::isfinite(f_try) && f_try < f) {
                x = x_try;
                w = std::move(w_try);
                f = f_try;
                lambda *= opts.lambda_down;
                accepted = true;
                ++report.iterations;
                report.trace.push_back(f);
                if (step.lpNorm<Eigen::Infinity>() <= opts.step_tol) {
                    report.converged = ConvergenceReason::step;
                    tolerance_hit = true;
                } else if (f <= opts.objective_tol) {
                    report.converged = ConvergenceReason::objective;
                    tolerance_hit = true;
                }
                break;
            }
            lambda *= opts.lambda_up;
        }
        if (!accepted || tolerance_hit) {
            if (!accepted) report.converged = ConvergenceReason::max_iter;  // stagnation
            break;
        }
    }

    // Iterates are unconstrained, so a rotation component can converge onto a
    // 2*pi-wrapped representative of the solution transform. Report the
    // canonical-chart representative (|r| <= pi); the objective is unchanged.
    bool remapped = false;
    for (Motiond& m : x) {
        if (m.r.norm() > std::numbers::pi) {
            m = dq_to_motion(motion_to_dq(m));
            remapped = true;
        }
    }
    if (remapped) f = objective_of(weighted_residuals(problem, x));

    report.final_x = std::move(x);
    report.final_objective = f;
    return report;
}

}  // namespace

SolveReport levenberg_marquardt(const ResidualProblem& problem, const MotionVectord& x0,
                                const SolverOptions& options) {
    options.validate();
    if (static_cast<int>(x0.size()) != problem.free_count())
        throw std::invalid_argument("starting point dimension does not match problem");

    SolveReport best = lm_single_run(problem, x0, options);
    if (options.max_restarts > 0) {
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        int attempts = 0;
        while (attempts < options.max_restarts && best.final_objective > options.restart_objective) {
            ++attempts;
            MotionVectord x_start = x0;
            for (Motiond& m : x_start) {
                Vec3d dr, dt;
                for (int i = 0; i < 3; ++i) dr[i] = gauss(rng);
                for (int i = 0; i < 3; ++i) dt[i] = gauss(rng);
                m = Motiond(m.r + dr, m.t + dt);
            }
            SolveReport candidate = lm_single_run(problem, x_start, options);
            if (candidate.final_objective < best.final_objective) best = std::move(candidate);
        }
        best.restarts_used = attempts;
    }
    return best;
}

double gradient_check(const ResidualProblem& problem, const MotionVectord& x, double h) {
    const Eigen::MatrixXd jac = numeric_jacobian(problem, x, h);
    const VecXd g_assembled = jac.transpose() * weighted_residuals(problem, x);

    const VecXd x_flat = flatten(x);
    VecXd g_direct(x_flat.size());
    for (Eigen::Index k = 0; k < x_flat.size(); ++k) {
        VecXd plus = x_flat, minus = x_flat;
        plus[k] += h;
        minus[k] -= h;
        g_direct[k] = (objective(problem, unflatten(plus, x.size())) -
                       objective(problem, unflatten(minus, x.size()))) /
                      (2.0 * h);
    }
    const double scale = std::max({1.0, g_assembled.lpNorm<Eigen::Infinity>(),
                                   g_direct.lpNorm<Eigen::Infinity>()});
    return (g_assembled - g_direct).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace motopt
