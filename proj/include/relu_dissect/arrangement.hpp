#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relu_dissect/polyhedron.hpp"

namespace relu_dissect {

enum class Sign : char { Positive = '+', Negative = '-' };

/// A node of the bisection tree. Children exist iff split is set; the left
/// child lies on the positive side of split, the right child on the negative.
struct RegionTree {
    HPolyhedron region;
    ChebyshevBall ball;
    std::optional<Halfspace> split;
    std::size_t split_index = 0;  // position of split in the hyperplane list
    std::unique_ptr<RegionTree> left;
    std::unique_ptr<RegionTree> right;

    bool is_leaf() const { return !split.has_value(); }
    std::size_t leaf_count() const;
};

struct ArrangementLeaf {
    HPolyhedron region;
    std::vector<Sign> signs;  // one entry per input hyperplane
    ChebyshevBall ball;       // interior point and inscribed radius
};

struct ArrangementResult {
    std::vector<ArrangementLeaf> leaves;  // sorted lexicographically by sign vector
};

struct ArrangementOptions {
    double tol = kGeomTol;
    /// Skip subtrees whose node region misses the hyperplane. Disabling it
    /// tests every leaf against every hyperplane; the result is the same.
    bool prune = true;
};

/// Runs the bisection over `hyperplanes` in order, exactly as given (no
/// deduplication). Children with empty interior are never created.
RegionTree build_region_tree(const HPolyhedron& root, const std::vector<Halfspace>& hyperplanes,
                             const ArrangementOptions& options = {});

/// Cells of the arrangement of `hyperplanes` restricted to `root`.
/// Hyperplanes that coincide (up to scale and orientation) are processed once.
/// Throws EmptyRoot if root has empty interior and DimensionMismatch on
/// dimension disagreement.
ArrangementResult get_regions(const HPolyhedron& root, const std::vector<Halfspace>& hyperplanes,
                              const ArrangementOptions& options = {});

/// Upper bound on the number of cells cut out by n hyperplanes in d
/// dimensions: sum_{j=0..d} C(n, j). Throws OutOfRange if it does not fit in 64 bits.
std::uint64_t zaslavsky_bound(std::int64_t n, std::int64_t d);

std::string to_string(const std::vector<Sign>& signs);

}  // namespace relu_dissect
