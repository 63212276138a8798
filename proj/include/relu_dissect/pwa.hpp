#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relu_dissect/network.hpp"
#include "relu_dissect/polyhedron.hpp"

namespace relu_dissect {

/// Active ('+') / inactive ('-') state of every ReLU neuron in network order.
struct ActivationPattern {
    std::string bits;

    std::size_t size() const { return bits.size(); }
    bool active(std::size_t i) const { return bits[i] == '+'; }
    auto operator<=>(const ActivationPattern&) const = default;
};

/// One piece of the PWA function: on `region`, the network computes
/// matrix * [x; 1] (last row of `matrix` is the homogeneous e_last).
struct LinearRegion {
    HPolyhedron region;
    Eigen::MatrixXd matrix;
    ActivationPattern pattern;

    /// matrix * [x; 1] restricted to output coordinates.
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

struct PwaFunction {
    Eigen::Index input_dim = 0;
    Eigen::Index output_dim = 0;
    HPolyhedron domain;
    std::vector<LinearRegion> regions;  // sorted by pattern
};

struct ConvertOptions {
    double tol = kGeomTol;
    /// Neuron rows whose input-space normal is shorter than this are constant
    /// on the region and emit no hyperplane.
    double degenerate_tol = 1e-12;
    /// Worker threads for the per-region tasks; 0 means hardware concurrency.
    unsigned workers = 1;
};

struct ConversionStats {
    std::vector<std::size_t> relu_widths;          // width of each ReLU node
    std::vector<std::size_t> working_set_sizes;    // after each ReLU node
    std::vector<std::size_t> max_subregions;       // most cells produced from one region, per ReLU node
    std::vector<std::uint64_t> subregion_bounds;   // zaslavsky_bound(width, d), per ReLU node
    unsigned workers = 1;
    double seconds = 0.0;
};

/// Exact PWA form of `net` over the bounded `domain`.
/// Throws DimensionMismatch, UnboundedDomain or EmptyDomain.
PwaFunction convert(const Network& net, const HPolyhedron& domain, const ConvertOptions& options = {},
                    ConversionStats* stats = nullptr);

struct DegenerateNeuron {
    std::size_t row;
    double offset;  // the constant pre-activation on the region
};

struct NeuronHyperplanes {
    std::vector<Halfspace> hyperplanes;
    std::vector<std::size_t> rows;  // row of P behind each hyperplane
    std::vector<DegenerateNeuron> degenerate;
};

/// Boundaries of the first `node_width` neurons of P expressed in input
/// coordinates. P must have node_width + 1 rows.
NeuronHyperplanes neuron_hyperplanes(const Eigen::MatrixXd& p, std::size_t node_width,
                                     double degenerate_tol = 1e-12);

/// Copy of P with the listed rows zeroed. The homogeneous (last) row may not
/// be listed; throws IndexOutOfRange.
Eigen::MatrixXd apply_pattern(const Eigen::MatrixXd& p, const std::set<std::size_t>& inactive_rows);

/// Index of the first region containing x. Exact containment is preferred;
/// otherwise the first region containing x within tol. Throws OutsideDomain.
std::size_t region_of(const PwaFunction& pwa, const Eigen::VectorXd& x, double tol = kGeomTol);

Eigen::VectorXd eval_pwa(const PwaFunction& pwa, const Eigen::VectorXd& x, double tol = kGeomTol);

/// The box [-bound, bound]^dim used as the default analysis domain.
HPolyhedron default_domain(Eigen::Index dim, double bound = 10.0);

}  // namespace relu_dissect
