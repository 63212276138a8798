#include "relu_dissect/pwa.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "relu_dissect/arrangement.hpp"
#include "relu_dissect/errors.hpp"

namespace relu_dissect {

namespace {

struct WorkItem {
    HPolyhedron region;
    Eigen::MatrixXd matrix;
    std::string pattern;
};

// Runs task(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any task is rethrown after all threads joined.
template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void validate_domain(const HPolyhedron& domain, Eigen::Index input_dim, double tol) {
    if (domain.dim() != input_dim)
        throw DimensionMismatch("domain has dimension " + std::to_string(domain.dim()) + ", network input is " +
                                std::to_string(input_dim));
    try {
        bounding_box(domain);
    } catch (const Unbounded& e) {
        throw UnboundedDomain(e.what());
    } catch (const EmptyInput& e) {
        throw EmptyDomain(e.what());
    }
    if (chebyshev_center(domain).radius < tol) throw EmptyDomain("domain has empty interior");
}

// Splits one working-set entry by the boundaries of a ReLU node of width n.
std::vector<WorkItem> split_region(const WorkItem& item, std::size_t n, const ConvertOptions& options) {
    const NeuronHyperplanes neurons = neuron_hyperplanes(item.matrix, n, options.degenerate_tol);
    ArrangementOptions arrangement_options;
    arrangement_options.tol = options.tol;
    ArrangementResult cells = get_regions(item.region, neurons.hyperplanes, arrangement_options);

    std::vector<bool> degenerate(n, false);
    std::vector<bool> degenerate_active(n, false);
    for (const auto& dn : neurons.degenerate) {
        degenerate[dn.row] = true;
        degenerate_active[dn.row] = dn.offset >= 0.0;
    }

    std::vector<WorkItem> out;
    out.reserve(cells.leaves.size());
    const Eigen::Index d = item.region.dim();
    for (auto& leaf : cells.leaves) {
        Eigen::VectorXd v(d + 1);
        v.head(d) = leaf.ball.center;
        v(d) = 1.0;
        const Eigen::VectorXd pre = item.matrix * v;
        std::set<std::size_t> inactive;
        std::string bits = item.pattern;
        for (std::size_t i = 0; i < n; ++i) {
            const bool active = degenerate[i] ? degenerate_active[i] : pre(static_cast<Eigen::Index>(i)) >= 0.0;
            bits.push_back(active ? '+' : '-');
            if (!active) inactive.insert(i);
        }
        out.push_back({std::move(leaf.region), apply_pattern(item.matrix, inactive), std::move(bits)});
    }
    return out;
}

}  // namespace

Eigen::VectorXd LinearRegion::apply(const Eigen::VectorXd& x) const {
    const Eigen::Index d = matrix.cols() - 1;
    const Eigen::Index m = matrix.rows() - 1;
    return matrix.topLeftCorner(m, d) * x + matrix.topRightCorner(m, 1);
}

NeuronHyperplanes neuron_hyperplanes(const Eigen::MatrixXd& p, std::size_t node_width, double degenerate_tol) {
    if (static_cast<std::size_t>(p.rows()) != node_width + 1)
        throw DimensionMismatch("P has " + std::to_string(p.rows()) + " rows, expected node width + 1 = " +
                                std::to_string(node_width + 1));
    const Eigen::Index d = p.cols() - 1;
    NeuronHyperplanes out;
    for (std::size_t i = 0; i < node_width; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        Eigen::VectorXd w = p.row(r).head(d).transpose();
        const double b = p(r, d);
        if (w.norm() < degenerate_tol) {
            out.degenerate.push_back({i, b});
            continue;
        }
        out.hyperplanes.emplace_back(std::move(w), b);
        out.rows.push_back(i);
    }
    return out;
}

Eigen::MatrixXd apply_pattern(const Eigen::MatrixXd& p, const std::set<std::size_t>& inactive_rows) {
    Eigen::MatrixXd out = p;
    for (std::size_t row : inactive_rows) {
        if (row + 1 >= static_cast<std::size_t>(p.rows()))
            throw IndexOutOfRange("row " + std::to_string(row) + " is not a neuron row of a " +
                                  std::to_string(p.rows()) + "-row matrix");
        out.row(static_cast<Eigen::Index>(row)).setZero();
    }
    return out;
}

PwaFunction convert(const Network& net, const HPolyhedron& domain, const ConvertOptions& options,
                    ConversionStats* stats) {
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index d = net.input_dim();
    validate_domain(domain, d, options.tol);
    const unsigned workers = resolve_workers(options.workers);

    ConversionStats local;
    local.workers = workers;
    std::vector<WorkItem> working{{domain, Eigen::MatrixXd::Identity(d + 1, d + 1), {}}};

    for (std::size_t layer = 0; layer < net.layers().size(); ++layer) {
        const auto& node = net.layers()[layer];
        if (const auto* dense = std::get_if<DenseLayer>(&node)) {
            const Eigen::MatrixXd t = homogeneous(*dense);
            for (auto& item : working) item.matrix = t * item.matrix;
            continue;
        }
        const auto width = static_cast<std::size_t>(net.width_before(layer));
        std::vector<std::vector<WorkItem>> pieces(working.size());
        parallel_for(working.size(), workers,
                     [&](std::size_t k) { pieces[k] = split_region(working[k], width, options); });

        std::vector<WorkItem> next;
        std::size_t most = 0;
        for (auto& group : pieces) {
            most = std::max(most, group.size());
            for (auto& item : group) next.push_back(std::move(item));
        }
        working = std::move(next);
        local.relu_widths.push_back(width);
        local.working_set_sizes.push_back(working.size());
        local.max_subregions.push_back(most);
        local.subregion_bounds.push_back(zaslavsky_bound(static_cast<std::int64_t>(width), d));
    }

    PwaFunction pwa;
    pwa.input_dim = d;
    pwa.output_dim = net.output_dim();
    pwa.domain = domain;
    pwa.regions.reserve(working.size());
    for (auto& item : working)
        pwa.regions.push_back({std::move(item.region), std::move(item.matrix), {std::move(item.pattern)}});
    std::stable_sort(pwa.regions.begin(), pwa.regions.end(),
                     [](const LinearRegion& a, const LinearRegion& b) { return a.pattern < b.pattern; });

    local.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (stats) *stats = std::move(local);
    return pwa;
}

std::size_t region_of(const PwaFunction& pwa, const Eigen::VectorXd& x, double tol) {
    if (x.size() != pwa.input_dim)
        throw DimensionMismatch("point has " + std::to_string(x.size()) + " entries, PWA input is " +
                                std::to_string(pwa.input_dim));
    for (std::size_t i = 0; i < pwa.regions.size(); ++i)
        if (contains(pwa.regions[i].region, x, 0.0)) return i;
    for (std::size_t i = 0; i < pwa.regions.size(); ++i)
        if (contains(pwa.regions[i].region, x, tol)) return i;
    throw OutsideDomain("point lies in no region");
}

Eigen::VectorXd eval_pwa(const PwaFunction& pwa, const Eigen::VectorXd& x, double tol) {
    return pwa.regions[region_of(pwa, x, tol)].apply(x);
}

HPolyhedron default_domain(Eigen::Index dim, double bound) {
    return HPolyhedron::box(dim, -bound, bound);
}

}  // namespace relu_dissect
