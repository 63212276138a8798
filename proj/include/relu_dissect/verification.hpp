#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "relu_dissect/network.hpp"
#include "relu_dissect/pwa.hpp"

namespace relu_dissect {

inline constexpr std::uint64_t kDefaultSeed = 20240101;
inline constexpr double kEquivalenceTol = 1e-9;
inline constexpr double kContinuityTol = 1e-8;

struct EquivalenceReport {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    double max_abs_diff = 0.0;
    Eigen::VectorXd argmax_point;
    bool pass = false;

    nlohmann::json to_json() const;
};

struct PartitionReport {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::size_t uncovered = 0;
    std::size_t multiply_covered_interior = 0;
    bool pass = false;

    nlohmann::json to_json() const;
};

struct ContinuityReport {
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::size_t candidate_pairs = 0;  // patterns at Hamming distance one
    std::size_t pairs_checked = 0;    // candidates with an LP-verified shared facet
    std::size_t points_checked = 0;
    double max_abs_diff = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
};

struct CountReport {
    std::size_t region_count = 0;
    std::vector<std::size_t> per_layer_counts;       // working set after each ReLU node
    std::vector<std::size_t> per_layer_expansion;    // most children of one region, per ReLU node
    std::vector<std::uint64_t> per_layer_bounds;     // zaslavsky_bound(width, d)
    std::vector<std::uint64_t> zaslavsky_products;   // running product of the bounds, saturating
    bool pass = false;

    nlohmann::json to_json() const;
};

/// Uniform sample from a bounded polyhedron (rejection from its bounding box).
class DomainSampler {
  public:
    DomainSampler(const HPolyhedron& domain, std::uint64_t seed);
    Eigen::VectorXd next();

  private:
    const HPolyhedron& domain_;
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
    std::mt19937_64 rng_;
};

/// max |forward(x) - eval_pwa(x)| over uniform domain samples; pass iff < tol.
EquivalenceReport check_equivalence(const Network& net, const PwaFunction& pwa, std::size_t samples,
                                    std::uint64_t seed = kDefaultSeed, double tol = kEquivalenceTol);

/// Counts samples lying in no region (beyond tol) and samples lying strictly
/// inside (by more than tol) two or more regions.
PartitionReport check_partition(const PwaFunction& pwa, std::size_t samples, std::uint64_t seed = kDefaultSeed,
                                double tol = kGeomTol);

/// Compares the affine maps of adjacent regions at points of their shared
/// facet. Adjacency candidates are regions whose patterns differ in one
/// neuron; a candidate counts once an LP finds a facet of positive radius.
/// At most `max_pairs` verified pairs are examined (0 = all).
ContinuityReport check_continuity(const PwaFunction& pwa, std::size_t max_pairs, double tol = kContinuityTol,
                                  std::uint64_t seed = kDefaultSeed, std::size_t points_per_pair = 10);

/// Region counts per ReLU node, recovered from pattern prefixes, against the
/// per-node hyperplane-arrangement bound.
CountReport count_report(const Network& net, const PwaFunction& pwa);

}  // namespace relu_dissect
