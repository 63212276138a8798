#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace relu_dissect::lp {

inline constexpr double kDefaultTol = 1e-9;

/// maximize c.x  subject to  A.x <= b  and optional per-variable bounds.
/// Variables without bounds are free.
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd constraint_matrix;
    Eigen::VectorXd constraint_rhs;
    std::vector<std::optional<double>> lower;  // empty, or one entry per variable
    std::vector<std::optional<double>> upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd point;          // set iff Optimal
    double objective_value = 0.0;   // meaningful iff Optimal
    int iterations = 0;

    bool optimal() const { return status == LpStatus::Optimal; }
};

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
/// Throws MalformedProblem for dimension mismatches or non-finite data.
LpOutcome solve_lp(const LpProblem& problem, double tol = kDefaultTol);

/// True iff {x : A.x <= b} is nonempty.
bool feasible(const Eigen::MatrixXd& constraint_matrix, const Eigen::VectorXd& constraint_rhs,
              double tol = kDefaultTol);

const char* to_string(LpStatus status);

}  // namespace relu_dissect::lp
