#pragma once

#include "motopt/residual.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace motopt {

struct SolverOptions {
    int max_iterations = 200;
    double grad_tol = 1e-10;       // on the inf-norm of J^T z
    double step_tol = 1e-12;       // on the inf-norm of an accepted step
    double objective_tol = 1e-16;  // absolute, on the objective value
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.25;
    double fd_step = 1e-6;
    std::uint64_t seed = 0;  // drives randomized restarts when max_restarts > 0
    int max_restarts = 0;
    double restart_objective = 1e-10;  // restart while the best objective exceeds this

    void validate() const;
};

enum class ConvergenceReason { gradient, step, objective, max_iter };

std::string to_string(ConvergenceReason reason);

struct SolveReport {
    // Solution in the canonical chart: rotation components with |r| <= pi.
    MotionVectord final_x;
    double final_objective = 0.0;
    int iterations = 0;  // accepted steps
    ConvergenceReason converged = ConvergenceReason::max_iter;
    // Objective values of the reported run: initial value followed by one
    // entry per accepted step; strictly decreasing.
    std::vector<double> trace;
    int restarts_used = 0;
};

enum class FdScheme { central, forward };

/// Thrown when a finite-difference probe produces a non-finite residual.
struct EvaluationError : std::runtime_error {
    EvaluationError(int coordinate, const std::string& what)
        : std::runtime_error(what), coordinate(coordinate) {}
    int coordinate;
};

/// Residual motions at x, flattened with sqrt(sigma) applied to translation
/// rows, so that (1/2) ||result||_2^2 equals the objective.
VecXd weighted_residuals(const ResidualProblem& problem, const MotionVectord& x);

/// Finite-difference Jacobian of the weighted residual vector, 6m x 6n,
/// columns in flatten() order. Central differences by default.
Eigen::MatrixXd numeric_jacobian(const ResidualProblem& problem, const MotionVectord& x, double h,
                                 FdScheme scheme = FdScheme::central);

/// Damped least squares on (1/2)||z(x)||^2: solve (J^T J + lambda I) d = -J^T z,
/// accept only decreasing steps (lambda shrinks on accept, grows on reject, at
/// most 50 rejects per iteration). Deterministic given (problem, x0, options).
/// Never throws for numerical trouble; bad inputs (dimension mismatch,
/// non-finite objective at x0) throw std::invalid_argument.
SolveReport levenberg_marquardt(const ResidualProblem& problem, const MotionVectord& x0,
                                const SolverOptions& options = {});

/// Max relative discrepancy between the gradient assembled as J^T z and a
/// direct central-difference gradient of the scalar objective:
/// ||g_J - g_fd||_inf / max(1, ||g_J||_inf, ||g_fd||_inf).
double gradient_check(const ResidualProblem& problem, const MotionVectord& x, double h = 1e-6);

}  // namespace motopt
