#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace relu_dissect {

/// Default tolerance for geometric predicates. It bounds an inscribed-ball
/// radius, so it is looser than the LP residual tolerance.
inline constexpr double kGeomTol = 1e-7;

/// The closed halfspace { x : normal.x + offset >= 0 }.
/// The normal is stored as given (never normalized).
struct Halfspace {
    Eigen::VectorXd normal;
    double offset = 0.0;

    Halfspace() = default;
    /// Throws MalformedProblem for an empty, zero or non-finite normal.
    Halfspace(Eigen::VectorXd normal, double offset);

    Eigen::Index dim() const { return normal.size(); }
    double value(const Eigen::VectorXd& x) const { return normal.dot(x) + offset; }
    Halfspace flipped() const { return Halfspace(-normal, -offset); }
};

/// Chebyshev ball of a polyhedron. radius < 0 means the interior is empty.
struct ChebyshevBall {
    Eigen::VectorXd center;
    double radius = 0.0;
};

/// Intersection of halfspaces, stored as the stacked matrix H = [W b] with
/// one row per halfspace; x belongs to the set iff H [x; 1] >= 0.
class HPolyhedron {
  public:
    HPolyhedron() = default;
    explicit HPolyhedron(Eigen::Index dim);
    /// H has dim + 1 columns, the last one being the offsets.
    explicit HPolyhedron(Eigen::MatrixXd h);
    HPolyhedron(Eigen::Index dim, const std::vector<Halfspace>& rows);

    /// The box [lower, upper]^dim.
    static HPolyhedron box(Eigen::Index dim, double lower, double upper);
    static HPolyhedron box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

    Eigen::Index dim() const { return dim_; }
    Eigen::Index num_rows() const { return h_.rows(); }
    const Eigen::MatrixXd& matrix() const { return h_; }
    Halfspace row(Eigen::Index i) const;

    /// Row-wise values H [x; 1].
    Eigen::VectorXd slacks(const Eigen::VectorXd& x) const;

    /// Copy with one extra row appended last.
    HPolyhedron with_row(const Halfspace& h) const;

  private:
    Eigen::Index dim_ = 0;
    Eigen::MatrixXd h_;
};

/// Largest inscribed ball, from the LP  max r  s.t.  w_i.x + b_i >= r |w_i|.
/// Throws Unbounded when the radius is unbounded.
ChebyshevBall chebyshev_center(const HPolyhedron& poly, double lp_tol = 1e-9);

/// Full-dimensional emptiness: no ball of radius tol fits inside.
bool is_empty(const HPolyhedron& poly, double tol = kGeomTol);

/// Every row satisfies w.x + b >= -tol.
bool contains(const HPolyhedron& poly, const Eigen::VectorXd& x, double tol = kGeomTol);

/// True iff the hyperplane properly cuts the interior, i.e. both closed sides
/// are non-empty per is_empty. Tangency to a face returns false.
bool intersects_hyperplane(const HPolyhedron& poly, const Halfspace& h, double tol = kGeomTol);

/// (poly with h appended, poly with -h appended).
std::pair<HPolyhedron, HPolyhedron> bisect(const HPolyhedron& poly, const Halfspace& h);

/// Drops rows that do not change the point set, one LP per row.
/// Throws EmptyInput for a polyhedron without rows or without points.
HPolyhedron remove_redundant(const HPolyhedron& poly, double tol = kGeomTol);

/// Axis-aligned bounding box by 2*dim LPs. Throws Unbounded if any side is
/// unbounded and EmptyInput if the polyhedron has no points.
std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const HPolyhedron& poly);

}  // namespace relu_dissect
