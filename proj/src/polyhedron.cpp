#include "relu_dissect/polyhedron.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "relu_dissect/errors.hpp"
#include "relu_dissect/lp.hpp"

namespace relu_dissect {

namespace {

void require_dim(const HPolyhedron& poly, Eigen::Index dim, const char* what) {
    if (poly.dim() != dim)
        throw DimensionMismatch(std::string(what) + ": polyhedron has dimension " + std::to_string(poly.dim()) +
                                ", argument has " + std::to_string(dim));
}

}  // namespace

Halfspace::Halfspace(Eigen::VectorXd normal_, double offset_) : normal(std::move(normal_)), offset(offset_) {
    if (normal.size() == 0) throw MalformedProblem("halfspace needs dimension >= 1");
    if (!normal.allFinite() || !std::isfinite(offset)) throw MalformedProblem("halfspace has non-finite entries");
    if (normal.isZero(0.0)) throw MalformedProblem("halfspace normal is zero");
}

HPolyhedron::HPolyhedron(Eigen::Index dim) : dim_(dim), h_(0, dim + 1) {
    if (dim < 1) throw MalformedProblem("polyhedron dimension must be >= 1");
}

HPolyhedron::HPolyhedron(Eigen::MatrixXd h) : dim_(h.cols() - 1), h_(std::move(h)) {
    if (dim_ < 1) throw MalformedProblem("H matrix needs at least two columns");
    if (!h_.allFinite()) throw MalformedProblem("H matrix has non-finite entries");
}

HPolyhedron::HPolyhedron(Eigen::Index dim, const std::vector<Halfspace>& rows) : HPolyhedron(dim) {
    h_.resize(static_cast<Eigen::Index>(rows.size()), dim + 1);
    for (Eigen::Index i = 0; i < h_.rows(); ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (r.dim() != dim) throw DimensionMismatch("halfspace " + std::to_string(i) + " has wrong dimension");
        h_.row(i).head(dim) = r.normal.transpose();
        h_(i, dim) = r.offset;
    }
}

HPolyhedron HPolyhedron::box(Eigen::Index dim, double lower, double upper) {
    return box(Eigen::VectorXd::Constant(dim, lower), Eigen::VectorXd::Constant(dim, upper));
}

HPolyhedron HPolyhedron::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    const Eigen::Index d = lower.size();
    if (upper.size() != d) throw DimensionMismatch("box bounds differ in length");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * d, d + 1);
    for (Eigen::Index j = 0; j < d; ++j) {
        // x_j - lower_j >= 0 and upper_j - x_j >= 0
        h(2 * j, j) = 1.0;
        h(2 * j, d) = -lower(j);
        h(2 * j + 1, j) = -1.0;
        h(2 * j + 1, d) = upper(j);
    }
    return HPolyhedron(std::move(h));
}

Halfspace HPolyhedron::row(Eigen::Index i) const {
    Halfspace h;
    h.normal = h_.row(i).head(dim_).transpose();
    h.offset = h_(i, dim_);
    return h;
}

Eigen::VectorXd HPolyhedron::slacks(const Eigen::VectorXd& x) const {
    return h_.leftCols(dim_) * x + h_.col(dim_);
}

HPolyhedron HPolyhedron::with_row(const Halfspace& h) const {
    if (h.dim() != dim_) throw DimensionMismatch("appended halfspace has wrong dimension");
    Eigen::MatrixXd out(h_.rows() + 1, dim_ + 1);
    out.topRows(h_.rows()) = h_;
    out.row(h_.rows()).head(dim_) = h.normal.transpose();
    out(h_.rows(), dim_) = h.offset;
    HPolyhedron p;
    p.dim_ = dim_;
    p.h_ = std::move(out);
    return p;
}

ChebyshevBall chebyshev_center(const HPolyhedron& poly, double lp_tol) {
    const Eigen::Index d = poly.dim();
    const Eigen::MatrixXd& h = poly.matrix();
    if (h.rows() == 0) throw Unbounded("polyhedron without rows has unbounded inscribed ball");

    // Normalized rows:  -w_i/|w_i| . x + r <= b_i/|w_i|
    lp::LpProblem problem;
    problem.objective = Eigen::VectorXd::Zero(d + 1);
    problem.objective(d) = 1.0;
    problem.constraint_matrix.resize(h.rows(), d + 1);
    problem.constraint_rhs.resize(h.rows());
    Eigen::Index used = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double norm = h.row(i).head(d).norm();
        if (norm == 0.0) {
            if (h(i, d) < 0.0) return {Eigen::VectorXd::Zero(d), -std::numeric_limits<double>::infinity()};
            continue;
        }
        problem.constraint_matrix.row(used).head(d) = -h.row(i).head(d) / norm;
        problem.constraint_matrix(used, d) = 1.0;
        problem.constraint_rhs(used) = h(i, d) / norm;
        ++used;
    }
    problem.constraint_matrix.conservativeResize(used, d + 1);
    problem.constraint_rhs.conservativeResize(used);

    const auto outcome = lp::solve_lp(problem, lp_tol);
    if (outcome.status == lp::LpStatus::Unbounded) throw Unbounded("inscribed ball radius is unbounded");
    if (outcome.status != lp::LpStatus::Optimal) throw NumericalFailure("Chebyshev LP reported infeasible");
    return {outcome.point.head(d), outcome.point(d)};
}

bool is_empty(const HPolyhedron& poly, double tol) {
    return chebyshev_center(poly).radius < tol;
}

bool contains(const HPolyhedron& poly, const Eigen::VectorXd& x, double tol) {
    require_dim(poly, x.size(), "contains");
    const Eigen::MatrixXd& h = poly.matrix();
    const Eigen::Index d = poly.dim();
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        if (h.row(i).head(d).dot(x) + h(i, d) < -tol) return false;
    return true;
}

bool intersects_hyperplane(const HPolyhedron& poly, const Halfspace& h, double tol) {
    require_dim(poly, h.dim(), "intersects_hyperplane");
    return !is_empty(poly.with_row(h), tol) && !is_empty(poly.with_row(h.flipped()), tol);
}

std::pair<HPolyhedron, HPolyhedron> bisect(const HPolyhedron& poly, const Halfspace& h) {
    require_dim(poly, h.dim(), "bisect");
    return {poly.with_row(h), poly.with_row(h.flipped())};
}

HPolyhedron remove_redundant(const HPolyhedron& poly, double tol) {
    const Eigen::Index d = poly.dim();
    const Eigen::MatrixXd& h = poly.matrix();
    if (h.rows() == 0) throw EmptyInput("polyhedron has no rows");
    if (!lp::feasible(-h.leftCols(d), h.col(d))) throw EmptyInput("polyhedron is empty");

    std::vector<bool> keep(static_cast<std::size_t>(h.rows()), true);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double norm = h.row(i).head(d).norm();
        if (norm == 0.0) {
            keep[static_cast<std::size_t>(i)] = false;  // constant row, satisfied since poly is nonempty
            continue;
        }
        // min w_i.x + b_i over the other kept rows, with row i relaxed by one unit to stay bounded.
        lp::LpProblem problem;
        problem.objective = -h.row(i).head(d).transpose() / norm;
        problem.constraint_matrix.resize(h.rows(), d);
        problem.constraint_rhs.resize(h.rows());
        Eigen::Index used = 0;
        for (Eigen::Index k = 0; k < h.rows(); ++k) {
            if (k != i && !keep[static_cast<std::size_t>(k)]) continue;
            const double nk = h.row(k).head(d).norm();
            if (nk == 0.0) continue;
            problem.constraint_matrix.row(used) = -h.row(k).head(d) / nk;
            problem.constraint_rhs(used) = h(k, d) / nk + (k == i ? 1.0 : 0.0);
            ++used;
        }
        problem.constraint_matrix.conservativeResize(used, d);
        problem.constraint_rhs.conservativeResize(used);
        const auto outcome = lp::solve_lp(problem);
        if (outcome.status != lp::LpStatus::Optimal) continue;
        const double min_value = -outcome.objective_value + h(i, d) / norm;
        if (min_value >= -tol) keep[static_cast<std::size_t>(i)] = false;
    }

    Eigen::Index count = 0;
    for (bool k : keep) count += k;
    Eigen::MatrixXd out(count, d + 1);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        if (keep[static_cast<std::size_t>(i)]) out.row(r++) = h.row(i);
    return HPolyhedron(std::move(out));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const HPolyhedron& poly) {
    const Eigen::Index d = poly.dim();
    const Eigen::MatrixXd& h = poly.matrix();
    lp::LpProblem problem;
    problem.constraint_matrix = -h.leftCols(d);
    problem.constraint_rhs = h.col(d);
    Eigen::VectorXd lower(d), upper(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (double sign : {1.0, -1.0}) {
            problem.objective = Eigen::VectorXd::Zero(d);
            problem.objective(j) = sign;
            const auto outcome = lp::solve_lp(problem);
            if (outcome.status == lp::LpStatus::Infeasible) throw EmptyInput("polyhedron is empty");
            if (outcome.status == lp::LpStatus::Unbounded)
                throw Unbounded("polyhedron is unbounded along coordinate " + std::to_string(j));
            (sign > 0 ? upper : lower)(j) = outcome.point(j);
        }
    }
    return {lower, upper};
}

}  // namespace relu_dissect
