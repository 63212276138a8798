#include "relu_dissect/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "relu_dissect/errors.hpp"
#include "relu_dissect/network.hpp"
#include "relu_dissect/pwa.hpp"
#include "relu_dissect/serialization.hpp"

namespace relu_dissect::cli {

namespace {

// Writes to the named file, or to the fallback stream when the path is empty.
class Sink {
  public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
        buffer_ << std::setprecision(17);
    }
    std::ostream& stream() { return buffer_; }
    void commit() {
        if (path_.empty())
            fallback_ << buffer_.str();
        else
            write_text_file(path_, buffer_.str());
    }

  private:
    std::string path_;
    std::ostream& fallback_;
    std::ostringstream buffer_;
};

std::optional<Network> read_network(const std::string& path, std::ostream& log) {
    try {
        return load_network(read_json_file(path));
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return std::nullopt;
    }
}

std::optional<PwaFunction> read_pwa(const std::string& path, std::ostream& log) {
    try {
        return load_pwa(read_json_file(path));
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return std::nullopt;
    } catch (const nlohmann::json::exception& e) {
        log << "error: " << path << ": " << e.what() << '\n';
        return std::nullopt;
    }
}

std::string join(const std::vector<Eigen::Index>& values, char sep) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s.push_back(sep);
        s += std::to_string(values[i]);
    }
    return s;
}

PwaFunction reduce_regions(PwaFunction pwa) {
    for (auto& r : pwa.regions) r.region = remove_redundant(r.region);
    return pwa;
}

}  // namespace

unsigned resolve_worker_flag(std::optional<unsigned> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("RELU_DISSECT_WORKERS")) {
        char* end = nullptr;
        const unsigned long value = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0') return static_cast<unsigned>(value);
    }
    return 0;
}

int cmd_convert(const ConvertCommand& cmd, std::ostream& out, std::ostream& log) {
    auto net = read_network(cmd.network_path, log);
    if (!net) return kSchemaError;
    try {
        ConvertOptions options;
        options.tol = cmd.tol;
        options.workers = cmd.workers;
        ConversionStats stats;
        PwaFunction pwa = convert(*net, default_domain(net->input_dim(), cmd.box), options, &stats);
        if (cmd.remove_redundant) pwa = reduce_regions(std::move(pwa));
        Sink sink(cmd.out_path, out);
        sink.stream() << save_pwa(pwa).dump() << '\n';
        sink.commit();
        log << "regions: " << pwa.regions.size() << "  wall_time_s: " << stats.seconds
            << "  workers: " << stats.workers << '\n';
        return kOk;
    } catch (const Error& e) {
        log << "conversion error: " << e.what() << '\n';
        return kConversionError;
    }
}

int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& log) {
    auto net = read_network(cmd.network_path, log);
    if (!net) return kSchemaError;
    auto pwa = read_pwa(cmd.pwa_path, log);
    if (!pwa) return kSchemaError;
    try {
        const auto equivalence = check_equivalence(*net, *pwa, cmd.samples, cmd.seed, cmd.tol);
        const auto partition = check_partition(*pwa, cmd.samples, cmd.seed);
        const auto continuity = check_continuity(*pwa, cmd.continuity_pairs, cmd.continuity_tol, cmd.seed);
        const bool pass = equivalence.pass && partition.pass && continuity.pass;
        nlohmann::json report = {{"pass", pass},
                                 {"seed", cmd.seed},
                                 {"checks", {equivalence.to_json(), partition.to_json(), continuity.to_json()}}};
        out << report.dump(2) << '\n';
        return pass ? kOk : kCheckFailed;
    } catch (const OutsideDomain& e) {
        // A sample outside every region is a failed partition, not a crash.
        out << nlohmann::json{{"pass", false}, {"seed", cmd.seed}, {"error", e.what()}}.dump(2) << '\n';
        return kCheckFailed;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConversionError;
    }
}

int cmd_count(const CountCommand& cmd, std::ostream& out, std::ostream& log) {
    auto net = read_network(cmd.network_path, log);
    if (!net) return kSchemaError;
    auto pwa = read_pwa(cmd.pwa_path, log);
    if (!pwa) return kSchemaError;
    try {
        const auto report = count_report(*net, *pwa);
        out << report.to_json().dump(2) << '\n';
        return report.pass ? kOk : kCheckFailed;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConversionError;
    }
}

int cmd_export(const ExportCommand& cmd, std::ostream& out, std::ostream& log) {
    auto pwa = read_pwa(cmd.pwa_path, log);
    if (!pwa) return kSchemaError;
    try {
        PwaFunction result = cmd.remove_redundant ? reduce_regions(std::move(*pwa)) : std::move(*pwa);
        Sink sink(cmd.out_path, out);
        sink.stream() << save_pwa(result).dump() << '\n';
        sink.commit();
        return kOk;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConversionError;
    }
}

int cmd_plot_grid(const PlotGridCommand& cmd, std::ostream& out, std::ostream& log) {
    auto pwa = read_pwa(cmd.pwa_path, log);
    if (!pwa) return kSchemaError;
    if (pwa->input_dim != 2) {
        log << "error: plot-grid needs a 2-D input, got " << pwa->input_dim << '\n';
        return kNotPlanar;
    }
    if (cmd.output_index >= static_cast<std::size_t>(pwa->output_dim) || cmd.resolution < 1) {
        log << "error: output index must be < " << pwa->output_dim << " and resolution >= 1\n";
        return kConversionError;
    }
    try {
        const auto [lower, upper] = bounding_box(pwa->domain);
        auto coordinate = [&](Eigen::Index axis, std::size_t i) {
            if (cmd.resolution == 1) return 0.5 * (lower(axis) + upper(axis));
            return lower(axis) + (upper(axis) - lower(axis)) * static_cast<double>(i) /
                                     static_cast<double>(cmd.resolution - 1);
        };
        Sink sink(cmd.out_path, out);
        auto& csv = sink.stream();
        csv << "x1,x2,y,region_index\n";
        for (std::size_t i = 0; i < cmd.resolution; ++i) {
            for (std::size_t j = 0; j < cmd.resolution; ++j) {
                const Eigen::Vector2d x(coordinate(0, i), coordinate(1, j));
                if (!contains(pwa->domain, x, 0.0)) continue;
                const std::size_t k = region_of(*pwa, x);
                const double y = pwa->regions[k].apply(x)(static_cast<Eigen::Index>(cmd.output_index));
                csv << x(0) << ',' << x(1) << ',' << y << ',' << k << '\n';
            }
        }
        sink.commit();
        return kOk;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConversionError;
    }
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& log) {
    auto pwa = read_pwa(cmd.pwa_path, log);
    if (!pwa) return kSchemaError;
    if (pwa->output_dim != pwa->input_dim) {
        log << "error: simulate needs output_dim == input_dim\n";
        return kConversionError;
    }
    if (static_cast<Eigen::Index>(cmd.x0.size()) != pwa->input_dim || !(cmd.dt > 0.0)) {
        log << "error: x0 must have " << pwa->input_dim << " entries and dt must be positive\n";
        return kConversionError;
    }

    Sink sink(cmd.out_path, out);
    auto& csv = sink.stream();
    csv << 't';
    for (Eigen::Index i = 0; i < pwa->input_dim; ++i) csv << ",x" << i + 1;
    csv << ",region_index\n";

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(cmd.x0.data(), pwa->input_dim);
    auto field = [&](const Eigen::VectorXd& p) { return eval_pwa(*pwa, p); };
    int code = kOk;
    try {
        for (std::size_t step = 0;; ++step) {
            const std::size_t region = region_of(*pwa, x);
            csv << static_cast<double>(step) * cmd.dt;
            for (Eigen::Index i = 0; i < x.size(); ++i) csv << ',' << x(i);
            csv << ',' << region << '\n';
            if (step == cmd.steps) break;
            // classic fourth-order Runge-Kutta
            const Eigen::VectorXd k1 = field(x);
            const Eigen::VectorXd k2 = field(x + 0.5 * cmd.dt * k1);
            const Eigen::VectorXd k3 = field(x + 0.5 * cmd.dt * k2);
            const Eigen::VectorXd k4 = field(x + cmd.dt * k3);
            x += cmd.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    } catch (const OutsideDomain&) {
        log << "trajectory left the domain\n";
        code = kLeftDomain;
    }
    sink.commit();
    return code;
}

int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& log) {
    Sink sink(cmd.out_path, out);
    auto& csv = sink.stream();
    csv << "d,widths,depth,trial,region_count,wall_time_s,workers\n";
    std::uint64_t instance = 0;
    try {
        for (int d : cmd.dims) {
            for (int depth : cmd.depths) {
                for (int width : cmd.widths) {
                    for (std::size_t trial = 0; trial < cmd.trials; ++trial) {
                        RandomNetworkShape shape;
                        shape.input_dim = d;
                        shape.hidden_widths.assign(static_cast<std::size_t>(depth), width);
                        const Network net = random_network(shape, cmd.seed + instance++);
                        ConvertOptions options;
                        options.workers = cmd.workers;
                        ConversionStats stats;
                        const PwaFunction pwa = convert(net, default_domain(d, cmd.box), options, &stats);
                        csv << d << ',' << join(shape.hidden_widths, ';') << ',' << depth << ',' << trial << ','
                            << pwa.regions.size() << ',' << stats.seconds << ',' << stats.workers << '\n';
                        log << "d=" << d << " depth=" << depth << " width=" << width << " trial=" << trial
                            << " regions=" << pwa.regions.size() << " time=" << stats.seconds << "s\n";
                    }
                }
            }
        }
    } catch (const Error& e) {
        log << "conversion error: " << e.what() << '\n';
        sink.commit();
        return kConversionError;
    }
    sink.commit();
    return kOk;
}

}  // namespace relu_dissect::cli
