#include "relu_dissect/arrangement.hpp"

#include <algorithm>
#include <limits>

#include "relu_dissect/errors.hpp"

namespace relu_dissect {

namespace {

// A deduplicated hyperplane, and for every input hyperplane the index of its
// representative plus the relative orientation (+1 or -1).
struct UniqueHyperplanes {
    std::vector<Halfspace> planes;
    std::vector<std::size_t> representative;
    std::vector<int> orientation;
};

UniqueHyperplanes collapse_duplicates(const std::vector<Halfspace>& hyperplanes, double tol) {
    UniqueHyperplanes out;
    std::vector<Eigen::VectorXd> normalized;
    for (const auto& h : hyperplanes) {
        const double norm = h.normal.norm();
        Eigen::VectorXd key(h.dim() + 1);
        key.head(h.dim()) = h.normal / norm;
        key(h.dim()) = h.offset / norm;
        std::size_t match = normalized.size();
        int orientation = 1;
        for (std::size_t u = 0; u < normalized.size(); ++u) {
            if ((normalized[u] - key).cwiseAbs().maxCoeff() <= tol) {
                match = u;
                break;
            }
            if ((normalized[u] + key).cwiseAbs().maxCoeff() <= tol) {
                match = u;
                orientation = -1;
                break;
            }
        }
        if (match == normalized.size()) {
            normalized.push_back(key);
            out.planes.push_back(h);
        }
        out.representative.push_back(match);
        out.orientation.push_back(orientation);
    }
    return out;
}

class Bisector {
  public:
    Bisector(const std::vector<Halfspace>& planes, double tol) : planes_(planes), tol_(tol) {}

    // Bisects a leaf if the hyperplane properly cuts it. Returns true on a split.
    bool try_split(RegionTree& leaf, std::size_t index) const {
        const Halfspace& h = planes_[index];
        auto [plus, minus] = bisect(leaf.region, h);
        ChebyshevBall plus_ball = chebyshev_center(plus);
        if (plus_ball.radius < tol_) return false;
        ChebyshevBall minus_ball = chebyshev_center(minus);
        if (minus_ball.radius < tol_) return false;
        leaf.split = h;
        leaf.split_index = index;
        leaf.left = std::make_unique<RegionTree>(RegionTree{std::move(plus), std::move(plus_ball), {}, 0, {}, {}});
        leaf.right = std::make_unique<RegionTree>(RegionTree{std::move(minus), std::move(minus_ball), {}, 0, {}, {}});
        return true;
    }

    // Tree search with pruning: a hyperplane that misses a node misses all of its descendants.
    void search(RegionTree& node, std::size_t index) const {
        if (node.split) {
            if (!intersects_hyperplane(node.region, planes_[index], tol_)) return;
            search(*node.left, index);
            search(*node.right, index);
        } else {
            try_split(node, index);
        }
    }

  private:
    const std::vector<Halfspace>& planes_;
    double tol_;
};

void collect_leaves(RegionTree& node, std::vector<RegionTree*>& out) {
    if (!node.split) {
        out.push_back(&node);
        return;
    }
    collect_leaves(*node.left, out);
    collect_leaves(*node.right, out);
}

// Leaves with their per-unique-hyperplane signs; 0 marks "never split on this path".
void collect_signed(RegionTree& node, std::vector<int>& path, std::vector<std::pair<RegionTree*, std::vector<int>>>& out) {
    if (!node.split) {
        out.emplace_back(&node, path);
        return;
    }
    const std::size_t index = node.split_index;
    path[index] = 1;
    collect_signed(*node.left, path, out);
    path[index] = -1;
    collect_signed(*node.right, path, out);
    path[index] = 0;
}

std::size_t count_leaves(const RegionTree& t) {
    return t.is_leaf() ? 1 : count_leaves(*t.left) + count_leaves(*t.right);
}

}  // namespace

std::size_t RegionTree::leaf_count() const { return count_leaves(*this); }

RegionTree build_region_tree(const HPolyhedron& root, const std::vector<Halfspace>& hyperplanes,
                             const ArrangementOptions& options) {
    for (std::size_t i = 0; i < hyperplanes.size(); ++i)
        if (hyperplanes[i].dim() != root.dim())
            throw DimensionMismatch("hyperplane " + std::to_string(i) + " has dimension " +
                                    std::to_string(hyperplanes[i].dim()) + ", root has " +
                                    std::to_string(root.dim()));

    RegionTree tree{root, chebyshev_center(root), {}, 0, {}, {}};
    if (tree.ball.radius < options.tol) throw EmptyRoot("root region has empty interior");

    const Bisector bisector(hyperplanes, options.tol);
    for (std::size_t index = 0; index < hyperplanes.size(); ++index) {
        if (options.prune) {
            bisector.search(tree, index);
        } else {
            std::vector<RegionTree*> leaves;
            collect_leaves(tree, leaves);
            for (RegionTree* leaf : leaves) bisector.try_split(*leaf, index);
        }
    }
    return tree;
}

ArrangementResult get_regions(const HPolyhedron& root, const std::vector<Halfspace>& hyperplanes,
                              const ArrangementOptions& options) {
    for (std::size_t i = 0; i < hyperplanes.size(); ++i)
        if (hyperplanes[i].dim() != root.dim())
            throw DimensionMismatch("hyperplane " + std::to_string(i) + " has dimension " +
                                    std::to_string(hyperplanes[i].dim()) + ", root has " +
                                    std::to_string(root.dim()));
    const UniqueHyperplanes unique = collapse_duplicates(hyperplanes, options.tol);
    RegionTree tree = build_region_tree(root, unique.planes, options);

    std::vector<std::pair<RegionTree*, std::vector<int>>> signed_leaves;
    std::vector<int> path(unique.planes.size(), 0);
    collect_signed(tree, path, signed_leaves);

    ArrangementResult result;
    result.leaves.reserve(signed_leaves.size());
    for (auto& [node, unique_signs] : signed_leaves) {
        for (std::size_t u = 0; u < unique_signs.size(); ++u)
            if (unique_signs[u] == 0)
                unique_signs[u] = unique.planes[u].value(node->ball.center) >= 0.0 ? 1 : -1;
        ArrangementLeaf leaf{std::move(node->region), {}, std::move(node->ball)};
        leaf.signs.reserve(hyperplanes.size());
        for (std::size_t i = 0; i < hyperplanes.size(); ++i) {
            const int s = unique_signs[unique.representative[i]] * unique.orientation[i];
            leaf.signs.push_back(s > 0 ? Sign::Positive : Sign::Negative);
        }
        result.leaves.push_back(std::move(leaf));
    }
    std::stable_sort(result.leaves.begin(), result.leaves.end(),
                     [](const ArrangementLeaf& a, const ArrangementLeaf& b) {
                         return std::lexicographical_compare(
                             a.signs.begin(), a.signs.end(), b.signs.begin(), b.signs.end(),
                             [](Sign x, Sign y) { return static_cast<char>(x) < static_cast<char>(y); });
                     });
    return result;
}

std::uint64_t zaslavsky_bound(std::int64_t n, std::int64_t d) {
    if (n < 0) throw OutOfRange("hyperplane count must be non-negative");
    if (d < 1) throw OutOfRange("dimension must be at least 1");
    using wide = unsigned __int128;
    constexpr wide limit = std::numeric_limits<std::uint64_t>::max();
    wide binomial = 1;  // C(n, 0)
    wide sum = 1;
    for (std::int64_t j = 1; j <= std::min(n, d); ++j) {
        binomial = binomial * static_cast<wide>(n - j + 1) / static_cast<wide>(j);
        sum += binomial;
        if (sum > limit) throw OutOfRange("region bound exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(sum);
}

std::string to_string(const std::vector<Sign>& signs) {
    std::string s;
    s.reserve(signs.size());
    for (Sign x : signs) s.push_back(static_cast<char>(x));
    return s;
}

}  // namespace relu_dissect
