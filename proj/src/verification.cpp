#include "relu_dissect/verification.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>

#include "relu_dissect/arrangement.hpp"
#include "relu_dissect/errors.hpp"
#include "relu_dissect/lp.hpp"

namespace relu_dissect {

using nlohmann::json;

namespace {

json point_json(const Eigen::VectorXd& x) {
    json out = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(x(i));
    return out;
}

// Row norms of the normal part of an H matrix; zero rows map to 1.
Eigen::VectorXd row_norms(const HPolyhedron& poly) {
    Eigen::VectorXd n = poly.matrix().leftCols(poly.dim()).rowwise().norm();
    for (Eigen::Index i = 0; i < n.size(); ++i)
        if (n(i) == 0.0) n(i) = 1.0;
    return n;
}

// Smallest normalized slack, i.e. the signed distance to the nearest facet.
double min_distance(const HPolyhedron& poly, const Eigen::VectorXd& norms, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd& h = poly.matrix();
    const Eigen::Index d = poly.dim();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        best = std::min(best, (h.row(i).head(d).dot(x) + h(i, d)) / norms(i));
    return best;
}

struct Facet {
    Eigen::VectorXd center;
    double radius = -1.0;
    Eigen::VectorXd normal;  // unit normal of the supporting hyperplane
};

// Largest (d-1)-ball on the common facet of two regions whose H matrices hold
// a pair of opposite rows. radius < 0 if no such facet exists.
Facet shared_facet(const HPolyhedron& a, const HPolyhedron& b) {
    const Eigen::Index d = a.dim();
    const Eigen::MatrixXd& ha = a.matrix();
    const Eigen::MatrixXd& hb = b.matrix();
    auto normalized = [d](const Eigen::MatrixXd& h, Eigen::Index i) -> Eigen::VectorXd {
        const double n = h.row(i).head(d).norm();
        return n == 0.0 ? Eigen::VectorXd(h.row(i).transpose()) : Eigen::VectorXd(h.row(i).transpose() / n);
    };

    Facet best;
    for (Eigen::Index i = 0; i < ha.rows(); ++i) {
        const Eigen::VectorXd row_a = normalized(ha, i);
        if (row_a.head(d).norm() == 0.0) continue;
        bool opposite = false;
        for (Eigen::Index k = 0; k < hb.rows() && !opposite; ++k)
            opposite = (normalized(hb, k) + row_a).cwiseAbs().maxCoeff() <= 1e-9;
        if (!opposite) continue;

        // max r  s.t.  row_a . [x;1] = 0,  every other non-parallel row has distance >= r.
        lp::LpProblem problem;
        problem.objective = Eigen::VectorXd::Zero(d + 1);
        problem.objective(d) = 1.0;
        std::vector<Eigen::VectorXd> rows;
        std::vector<double> rhs;
        Eigen::VectorXd eq = Eigen::VectorXd::Zero(d + 1);
        eq.head(d) = row_a.head(d);
        rows.push_back(eq);
        rhs.push_back(-row_a(d));
        rows.push_back(-eq);
        rhs.push_back(row_a(d));
        bool blocked = false;
        for (const Eigen::MatrixXd* h : {&ha, &hb}) {
            for (Eigen::Index k = 0; k < h->rows(); ++k) {
                const Eigen::VectorXd r = normalized(*h, k);
                if (r.head(d).norm() == 0.0) continue;
                const double alignment = r.head(d).dot(row_a.head(d));
                if (std::abs(std::abs(alignment) - 1.0) <= 1e-9) {
                    // Parallel rows are constant on the hyperplane.
                    if (r(d) - alignment * row_a(d) < -1e-9) blocked = true;
                    continue;
                }
                Eigen::VectorXd c(d + 1);
                c.head(d) = -r.head(d);
                c(d) = 1.0;
                rows.push_back(c);
                rhs.push_back(r(d));
            }
        }
        if (blocked) continue;
        problem.constraint_matrix.resize(static_cast<Eigen::Index>(rows.size()), d + 1);
        problem.constraint_rhs.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            problem.constraint_matrix.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
            problem.constraint_rhs(static_cast<Eigen::Index>(k)) = rhs[k];
        }
        // Cap the radius; in one dimension the facet is a point and nothing else bounds r.
        problem.upper.assign(static_cast<std::size_t>(d + 1), std::nullopt);
        problem.upper[static_cast<std::size_t>(d)] = 1.0;
        const auto outcome = lp::solve_lp(problem);
        if (!outcome.optimal()) continue;
        if (outcome.point(d) > best.radius) {
            best.center = outcome.point.head(d);
            best.radius = outcome.point(d);
            best.normal = row_a.head(d);
        }
    }
    return best;
}

std::uint64_t saturating_product(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

}  // namespace

json EquivalenceReport::to_json() const {
    return {{"check", "equivalence"}, {"pass", pass},     {"metric", max_abs_diff},
            {"seed", seed},           {"tol", tol},       {"samples", samples},
            {"argmax_point", point_json(argmax_point)}};
}

json PartitionReport::to_json() const {
    return {{"check", "partition"},
            {"pass", pass},
            {"metric", uncovered + multiply_covered_interior},
            {"seed", seed},
            {"tol", tol},
            {"samples", samples},
            {"uncovered", uncovered},
            {"multiply_covered_interior", multiply_covered_interior}};
}

json ContinuityReport::to_json() const {
    return {{"check", "continuity"},        {"pass", pass},
            {"metric", max_abs_diff},       {"seed", seed},
            {"tol", tol},                   {"candidate_pairs", candidate_pairs},
            {"pairs_checked", pairs_checked}, {"points_checked", points_checked}};
}

json CountReport::to_json() const {
    return {{"check", "count"},
            {"pass", pass},
            {"metric", region_count},
            {"seed", nullptr},
            {"tol", nullptr},
            {"region_count", region_count},
            {"per_layer_counts", per_layer_counts},
            {"per_layer_expansion", per_layer_expansion},
            {"per_layer_bounds", per_layer_bounds},
            {"zaslavsky_products", zaslavsky_products}};
}

DomainSampler::DomainSampler(const HPolyhedron& domain, std::uint64_t seed) : domain_(domain), rng_(seed) {
    std::tie(lower_, upper_) = bounding_box(domain);
}

Eigen::VectorXd DomainSampler::next() {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd x(lower_.size());
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lower_(i) + (upper_(i) - lower_(i)) * unit(rng_);
        if (contains(domain_, x, 0.0)) return x;
    }
    throw EmptyDomain("rejection sampling found no domain point");
}

EquivalenceReport check_equivalence(const Network& net, const PwaFunction& pwa, std::size_t samples,
                                    std::uint64_t seed, double tol) {
    if (net.input_dim() != pwa.input_dim || net.output_dim() != pwa.output_dim)
        throw DomainMismatch("network and PWA dimensions differ");
    if (samples < 1) throw OutOfRange("need at least one sample");
    EquivalenceReport report;
    report.samples = samples;
    report.seed = seed;
    report.tol = tol;
    DomainSampler sampler(pwa.domain, seed);
    report.argmax_point = Eigen::VectorXd::Zero(pwa.input_dim);
    for (std::size_t s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = sampler.next();
        const double diff = (forward(net, x) - eval_pwa(pwa, x)).cwiseAbs().maxCoeff();
        if (diff > report.max_abs_diff || s == 0) {
            report.max_abs_diff = diff;
            report.argmax_point = x;
        }
    }
    report.pass = report.max_abs_diff < tol;
    return report;
}

PartitionReport check_partition(const PwaFunction& pwa, std::size_t samples, std::uint64_t seed, double tol) {
    PartitionReport report;
    report.samples = samples;
    report.seed = seed;
    report.tol = tol;
    std::vector<Eigen::VectorXd> norms;
    norms.reserve(pwa.regions.size());
    for (const auto& r : pwa.regions) norms.push_back(row_norms(r.region));

    DomainSampler sampler(pwa.domain, seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = sampler.next();
        std::size_t covering = 0;
        std::size_t interior = 0;
        for (std::size_t i = 0; i < pwa.regions.size(); ++i) {
            const double dist = min_distance(pwa.regions[i].region, norms[i], x);
            if (dist >= -tol) ++covering;
            if (dist > tol) ++interior;
        }
        if (covering == 0) ++report.uncovered;
        if (interior > 1) ++report.multiply_covered_interior;
    }
    report.pass = report.uncovered == 0 && report.multiply_covered_interior == 0;
    return report;
}

ContinuityReport check_continuity(const PwaFunction& pwa, std::size_t max_pairs, double tol, std::uint64_t seed,
                                  std::size_t points_per_pair) {
    ContinuityReport report;
    report.seed = seed;
    report.tol = tol;

    std::unordered_map<std::string, std::size_t> by_pattern;
    for (std::size_t i = 0; i < pwa.regions.size(); ++i) by_pattern.emplace(pwa.regions[i].pattern.bits, i);
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < pwa.regions.size(); ++i) {
        std::string key = pwa.regions[i].pattern.bits;
        for (char& c : key) {
            const char original = c;
            c = original == '+' ? '-' : '+';
            auto it = by_pattern.find(key);
            if (it != by_pattern.end() && it->second > i) candidates.emplace_back(i, it->second);
            c = original;
        }
    }
    report.candidate_pairs = candidates.size();

    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Index d = pwa.input_dim;

    for (const auto& [i, j] : candidates) {
        if (max_pairs != 0 && report.pairs_checked >= max_pairs) break;
        const auto& a = pwa.regions[i];
        const auto& b = pwa.regions[j];
        const Facet facet = shared_facet(a.region, b.region);
        if (facet.radius <= kGeomTol) continue;
        ++report.pairs_checked;
        for (std::size_t p = 0; p < points_per_pair; ++p) {
            Eigen::VectorXd x = facet.center;
            if (p > 0 && d > 1) {
                Eigen::VectorXd u(d);
                for (Eigen::Index k = 0; k < d; ++k) u(k) = normal(rng);
                u -= u.dot(facet.normal) * facet.normal;
                if (u.norm() > 0.0) x += 0.9 * facet.radius * unit(rng) * u.normalized();
            }
            const double diff = (a.apply(x) - b.apply(x)).cwiseAbs().maxCoeff();
            report.max_abs_diff = std::max(report.max_abs_diff, diff);
            ++report.points_checked;
        }
    }
    report.pass = report.max_abs_diff < tol;
    return report;
}

CountReport count_report(const Network& net, const PwaFunction& pwa) {
    if (net.input_dim() != pwa.input_dim) throw DomainMismatch("network and PWA input dimensions differ");
    CountReport report;
    report.region_count = pwa.regions.size();

    std::vector<std::size_t> widths;
    for (std::size_t i = 0; i < net.layers().size(); ++i)
        if (std::holds_alternative<Relu>(net.layers()[i])) widths.push_back(static_cast<std::size_t>(net.width_before(i)));
    const std::size_t total = net.relu_neuron_count();
    for (const auto& r : pwa.regions)
        if (r.pattern.size() != total) throw DomainMismatch("pattern length differs from the network's ReLU count");

    std::size_t prefix = 0;
    std::uint64_t product = 1;
    bool pass = true;
    for (std::size_t w : widths) {
        // children per parent prefix
        std::map<std::string, std::set<std::string>> children;
        for (const auto& r : pwa.regions)
            children[r.pattern.bits.substr(0, prefix)].insert(r.pattern.bits.substr(0, prefix + w));
        std::size_t count = 0;
        std::size_t expansion = 0;
        for (const auto& [parent, kids] : children) {
            count += kids.size();
            expansion = std::max(expansion, kids.size());
        }
        const std::uint64_t bound = zaslavsky_bound(static_cast<std::int64_t>(w), pwa.input_dim);
        product = saturating_product(product, bound);
        report.per_layer_counts.push_back(count);
        report.per_layer_expansion.push_back(expansion);
        report.per_layer_bounds.push_back(bound);
        report.zaslavsky_products.push_back(product);
        pass = pass && expansion <= bound;
        prefix += w;
    }
    report.pass = pass && report.region_count <= product;
    return report;
}

}  // namespace relu_dissect
