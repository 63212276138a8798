#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "relu_dissect/polyhedron.hpp"
#include "relu_dissect/verification.hpp"

namespace relu_dissect::cli {

/// Process exit codes of the relu-dissect tool.
enum ExitCode : int {
    kOk = 0,
    kSchemaError = 1,      // unreadable or invalid input document
    kConversionError = 2,  // conversion failed or arguments inconsistent with the inputs
    kNotPlanar = 3,        // plot-grid on a network whose input is not 2-D
    kLeftDomain = 4,       // simulate: trajectory left the domain
    kCheckFailed = 5,      // verify/count: at least one check failed
};

struct ConvertCommand {
    std::string network_path;
    double box = 10.0;
    unsigned workers = 0;  // 0 = hardware concurrency
    double tol = kGeomTol;
    bool remove_redundant = false;
    std::string out_path;  // empty = stdout
};

struct VerifyCommand {
    std::string network_path;
    std::string pwa_path;
    std::size_t samples = 10000;
    std::uint64_t seed = kDefaultSeed;
    double tol = kEquivalenceTol;
    double continuity_tol = kContinuityTol;
    std::size_t continuity_pairs = 100;
};

struct CountCommand {
    std::string network_path;
    std::string pwa_path;
};

struct ExportCommand {
    std::string pwa_path;
    bool remove_redundant = false;
    std::string out_path;
};

struct PlotGridCommand {
    std::string pwa_path;
    std::size_t output_index = 0;
    std::size_t resolution = 101;
    std::string out_path;
};

struct SimulateCommand {
    std::string pwa_path;
    std::vector<double> x0;
    double dt = 1e-3;
    std::size_t steps = 1000;
    std::string out_path;
};

struct BenchCommand {
    std::vector<int> dims{2};
    std::vector<int> widths{3};
    std::vector<int> depths{1};
    std::size_t trials = 1;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 0;
    double box = 10.0;
    std::string out_path;
};

int cmd_convert(const ConvertCommand& cmd, std::ostream& out, std::ostream& log);
int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& log);
int cmd_count(const CountCommand& cmd, std::ostream& out, std::ostream& log);
int cmd_export(const ExportCommand& cmd, std::ostream& out, std::ostream& log);
int cmd_plot_grid(const PlotGridCommand& cmd, std::ostream& out, std::ostream& log);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& log);
int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& log);

/// --workers value if given, else RELU_DISSECT_WORKERS, else 0 (hardware concurrency).
unsigned resolve_worker_flag(std::optional<unsigned> flag);

}  // namespace relu_dissect::cli
