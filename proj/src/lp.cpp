#include "relu_dissect/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "relu_dissect/errors.hpp"

namespace relu_dissect::lp {

namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kReducedCostEps = 1e-11;
constexpr double kUnboundedEps = 1e-9;

void validate(const LpProblem& p) {
    const auto n = p.objective.size();
    const auto m = p.constraint_matrix.rows();
    if (p.constraint_matrix.cols() != n && m > 0)
        throw MalformedProblem("constraint matrix has " + std::to_string(p.constraint_matrix.cols()) +
                               " columns, objective has " + std::to_string(n) + " entries");
    if (p.constraint_rhs.size() != m)
        throw MalformedProblem("constraint matrix has " + std::to_string(m) + " rows, rhs has " +
                               std::to_string(p.constraint_rhs.size()) + " entries");
    if (!p.lower.empty() && static_cast<Eigen::Index>(p.lower.size()) != n)
        throw MalformedProblem("lower bound vector length differs from variable count");
    if (!p.upper.empty() && static_cast<Eigen::Index>(p.upper.size()) != n)
        throw MalformedProblem("upper bound vector length differs from variable count");
    if (!p.objective.allFinite() || !p.constraint_rhs.allFinite() ||
        (m > 0 && !p.constraint_matrix.allFinite()))
        throw MalformedProblem("non-finite entry in LP data");
    for (const auto& bound : p.lower)
        if (bound && !std::isfinite(*bound)) throw MalformedProblem("non-finite lower bound");
    for (const auto& bound : p.upper)
        if (bound && !std::isfinite(*bound)) throw MalformedProblem("non-finite upper bound");
}

// Dense tableau. Free variables are split as x = u - v, every row gets a slack,
// rows with negative rhs are negated and receive an artificial variable.
class Tableau {
  public:
    Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::Index num_vars)
        : m_(a.rows()), n_(num_vars) {
        Eigen::Index artificial = 0;
        for (Eigen::Index i = 0; i < m_; ++i)
            if (b(i) < 0) ++artificial;
        first_slack_ = 2 * n_;
        first_artificial_ = first_slack_ + m_;
        cols_ = first_artificial_ + artificial;
        stride_ = cols_ + 1;
        cells_.assign(static_cast<std::size_t>(m_ * stride_), 0.0);
        basis_.resize(static_cast<std::size_t>(m_));
        reduced_.assign(static_cast<std::size_t>(stride_), 0.0);

        Eigen::Index next_artificial = first_artificial_;
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double sign = b(i) < 0 ? -1.0 : 1.0;
            double* row = row_ptr(i);
            for (Eigen::Index j = 0; j < n_; ++j) {
                row[j] = sign * a(i, j);
                row[n_ + j] = -sign * a(i, j);
            }
            row[first_slack_ + i] = sign;
            row[cols_] = sign * b(i);
            if (b(i) < 0) {
                row[next_artificial] = 1.0;
                basis_[static_cast<std::size_t>(i)] = next_artificial++;
            } else {
                basis_[static_cast<std::size_t>(i)] = first_slack_ + i;
            }
        }
    }

    bool has_artificials() const { return cols_ > first_artificial_; }

    // Returns false when the feasible set is empty.
    bool phase_one(double feas_tol, int& iterations) {
        if (!has_artificials()) return true;
        std::vector<double> cost(static_cast<std::size_t>(cols_), 0.0);
        for (Eigen::Index j = first_artificial_; j < cols_; ++j) cost[static_cast<std::size_t>(j)] = -1.0;
        price(cost);
        // The auxiliary objective is bounded; a column without a pivot row is round-off.
        run(cols_, iterations, true);
        if (-reduced_[static_cast<std::size_t>(cols_)] < -feas_tol) return false;
        drive_out_artificials();
        return true;
    }

    LpStatus phase_two(const Eigen::VectorXd& c, int& iterations) {
        std::vector<double> cost(static_cast<std::size_t>(cols_), 0.0);
        for (Eigen::Index j = 0; j < n_; ++j) {
            cost[static_cast<std::size_t>(j)] = c(j);
            cost[static_cast<std::size_t>(n_ + j)] = -c(j);
        }
        price(cost);
        return run(first_artificial_, iterations, false);
    }

    Eigen::VectorXd solution() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const Eigen::Index var = basis_[static_cast<std::size_t>(i)];
            const double value = row_ptr(i)[cols_];
            if (var < n_)
                x(var) += value;
            else if (var < 2 * n_)
                x(var - n_) -= value;
        }
        return x;
    }

  private:
    double* row_ptr(Eigen::Index i) { return cells_.data() + i * stride_; }
    const double* row_ptr(Eigen::Index i) const { return cells_.data() + i * stride_; }

    // Reduced costs z_j = c_j - c_B B^-1 A_j, rhs slot holds minus the objective value.
    void price(const std::vector<double>& cost) {
        std::fill(reduced_.begin(), reduced_.end(), 0.0);
        for (Eigen::Index j = 0; j < cols_; ++j) reduced_[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double cb = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
            if (cb == 0.0) continue;
            const double* row = row_ptr(i);
            for (Eigen::Index j = 0; j <= cols_; ++j) reduced_[static_cast<std::size_t>(j)] -= cb * row[j];
        }
    }

    void pivot(Eigen::Index p, Eigen::Index q) {
        double* prow = row_ptr(p);
        const double inv = 1.0 / prow[q];
        for (Eigen::Index j = 0; j <= cols_; ++j) prow[j] *= inv;
        prow[q] = 1.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (i == p) continue;
            double* row = row_ptr(i);
            const double factor = row[q];
            if (factor == 0.0) continue;
            for (Eigen::Index j = 0; j <= cols_; ++j) row[j] -= factor * prow[j];
            row[q] = 0.0;
            if (row[cols_] < 0.0 && row[cols_] > -1e-13) row[cols_] = 0.0;
        }
        const double factor = reduced_[static_cast<std::size_t>(q)];
        if (factor != 0.0) {
            for (Eigen::Index j = 0; j <= cols_; ++j) reduced_[static_cast<std::size_t>(j)] -= factor * prow[j];
            reduced_[static_cast<std::size_t>(q)] = 0.0;
        }
        basis_[static_cast<std::size_t>(p)] = q;
    }

    // Bland's rule: lowest-index improving column enters; ratio ties leave by lowest basic index.
    // Columns whose ratio test finds no row are skipped (until the next pivot) when
    // `bounded` is set or when their reduced cost is at round-off level.
    LpStatus run(Eigen::Index enter_limit, int& iterations, bool bounded) {
        const int max_iterations = 50 * static_cast<int>(m_ + cols_) + 1000;
        std::vector<bool> skip(static_cast<std::size_t>(enter_limit), false);
        for (;;) {
            Eigen::Index q = -1;
            for (Eigen::Index j = 0; j < enter_limit; ++j) {
                if (!skip[static_cast<std::size_t>(j)] && reduced_[static_cast<std::size_t>(j)] > kReducedCostEps) {
                    q = j;
                    break;
                }
            }
            if (q < 0) return LpStatus::Optimal;

            Eigen::Index p = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double* row = row_ptr(i);
                if (row[q] <= kPivotEps) continue;
                const double ratio = std::max(row[cols_], 0.0) / row[q];
                const double slack = 1e-12 * (1.0 + std::abs(best));
                if (p < 0 || ratio < best - slack) {
                    best = ratio;
                    p = i;
                } else if (ratio <= best + slack &&
                           basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(p)]) {
                    p = i;
                }
            }
            if (p < 0) {
                if (!bounded && reduced_[static_cast<std::size_t>(q)] > kUnboundedEps) return LpStatus::Unbounded;
                skip[static_cast<std::size_t>(q)] = true;
                continue;
            }
            std::fill(skip.begin(), skip.end(), false);
            pivot(p, q);
            if (++iterations > max_iterations) throw NumericalFailure("simplex iteration limit reached");
        }
    }

    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < first_artificial_) continue;
            const double* row = row_ptr(i);
            Eigen::Index q = -1;
            double magnitude = kPivotEps;
            for (Eigen::Index j = 0; j < first_artificial_; ++j) {
                if (std::abs(row[j]) > magnitude) {
                    magnitude = std::abs(row[j]);
                    q = j;
                }
            }
            // A row without a usable pivot is linearly dependent; its artificial stays at zero.
            if (q >= 0) pivot(i, q);
        }
    }

    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::Index first_slack_ = 0;
    Eigen::Index first_artificial_ = 0;
    Eigen::Index cols_ = 0;
    Eigen::Index stride_ = 0;
    std::vector<double> cells_;
    std::vector<Eigen::Index> basis_;
    std::vector<double> reduced_;
};

}  // namespace

LpOutcome solve_lp(const LpProblem& problem, double tol) {
    if (!(tol > 0.0)) throw MalformedProblem("tolerance must be positive");
    validate(problem);

    const Eigen::Index n = problem.objective.size();
    Eigen::Index bound_rows = 0;
    for (const auto& bound : problem.lower) bound_rows += bound.has_value();
    for (const auto& bound : problem.upper) bound_rows += bound.has_value();

    const Eigen::Index m = problem.constraint_rhs.size();
    Eigen::MatrixXd a(m + bound_rows, n);
    Eigen::VectorXd b(m + bound_rows);
    if (m > 0) {
        a.topRows(m) = problem.constraint_matrix;
        b.head(m) = problem.constraint_rhs;
    }
    Eigen::Index r = m;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(problem.upper.size()); ++j) {
        if (!problem.upper[static_cast<std::size_t>(j)]) continue;
        a.row(r).setZero();
        a(r, j) = 1.0;
        b(r++) = *problem.upper[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(problem.lower.size()); ++j) {
        if (!problem.lower[static_cast<std::size_t>(j)]) continue;
        a.row(r).setZero();
        a(r, j) = -1.0;
        b(r++) = -*problem.lower[static_cast<std::size_t>(j)];
    }

    // Equilibrate rows so pivot thresholds mean the same thing for every row.
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double scale = n > 0 ? a.row(i).cwiseAbs().maxCoeff() : 0.0;
        if (scale > 0.0) {
            a.row(i) /= scale;
            b(i) /= scale;
        }
    }

    LpOutcome outcome;
    Tableau tableau(a, b, n);
    const double feas_tol = tol * std::max(1.0, b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    if (!tableau.phase_one(feas_tol, outcome.iterations)) {
        outcome.status = LpStatus::Infeasible;
        return outcome;
    }
    outcome.status = tableau.phase_two(problem.objective, outcome.iterations);
    if (outcome.status == LpStatus::Optimal) {
        outcome.point = tableau.solution();
        outcome.objective_value = problem.objective.dot(outcome.point);
    }
    return outcome;
}

bool feasible(const Eigen::MatrixXd& constraint_matrix, const Eigen::VectorXd& constraint_rhs, double tol) {
    LpProblem problem;
    problem.objective = Eigen::VectorXd::Zero(constraint_matrix.cols());
    problem.constraint_matrix = constraint_matrix;
    problem.constraint_rhs = constraint_rhs;
    // A zero objective can never be unbounded.
    return solve_lp(problem, tol).status != LpStatus::Infeasible;
}

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

}  // namespace relu_dissect::lp
