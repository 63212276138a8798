#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "relu_dissect/cli.hpp"

using namespace relu_dissect::cli;

int main(int argc, char** argv) {
    CLI::App app{"relu-dissect: exact piecewise-affine form of ReLU networks"};
    app.require_subcommand(1);

    std::optional<unsigned> workers;

    ConvertCommand convert;
    auto* convert_cmd = app.add_subcommand("convert", "Convert a network to its PWA representation");
    convert_cmd->add_option("--network", convert.network_path, "Network JSON")->required();
    convert_cmd->add_option("--box", convert.box, "Domain box half-width B, domain [-B, B]^d");
    convert_cmd->add_option("--workers", workers, "Worker threads (default: RELU_DISSECT_WORKERS or all cores)");
    convert_cmd->add_option("--tol", convert.tol, "Geometric tolerance");
    convert_cmd->add_flag("--remove-redundant", convert.remove_redundant, "Drop redundant region rows");
    convert_cmd->add_option("--out", convert.out_path, "Output PWA JSON (default stdout)");

    VerifyCommand verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check a PWA file against its network");
    verify_cmd->add_option("--network", verify.network_path, "Network JSON")->required();
    verify_cmd->add_option("--pwa", verify.pwa_path, "PWA JSON")->required();
    verify_cmd->add_option("--samples", verify.samples, "Random samples");
    verify_cmd->add_option("--seed", verify.seed, "Sampling seed");
    verify_cmd->add_option("--tol", verify.tol, "Equivalence tolerance");
    verify_cmd->add_option("--pairs", verify.continuity_pairs, "Adjacent region pairs for the continuity check");

    CountCommand count;
    auto* count_cmd = app.add_subcommand("count", "Region counts against the per-layer bound");
    count_cmd->add_option("--network", count.network_path, "Network JSON")->required();
    count_cmd->add_option("--pwa", count.pwa_path, "PWA JSON")->required();

    ExportCommand exporter;
    auto* export_cmd = app.add_subcommand("export", "Rewrite a PWA file canonically");
    export_cmd->add_option("--pwa", exporter.pwa_path, "PWA JSON")->required();
    export_cmd->add_flag("--remove-redundant", exporter.remove_redundant, "Drop redundant region rows");
    export_cmd->add_option("--out", exporter.out_path, "Output PWA JSON (default stdout)");

    PlotGridCommand grid;
    auto* grid_cmd = app.add_subcommand("plot-grid", "Sample a 2-D PWA function on a grid (CSV)");
    grid_cmd->add_option("--pwa", grid.pwa_path, "PWA JSON")->required();
    grid_cmd->add_option("--output-index", grid.output_index, "Output coordinate to tabulate");
    grid_cmd->add_option("--resolution", grid.resolution, "Grid points per axis");
    grid_cmd->add_option("--out", grid.out_path, "Output CSV (default stdout)");

    SimulateCommand simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate dx/dt = pwa(x) with RK4 (CSV)");
    simulate_cmd->add_option("--pwa", simulate.pwa_path, "PWA JSON")->required();
    simulate_cmd->add_option("--x0", simulate.x0, "Initial state")->required()->expected(1, -1);
    simulate_cmd->add_option("--dt", simulate.dt, "Step size");
    simulate_cmd->add_option("--steps", simulate.steps, "Number of steps");
    simulate_cmd->add_option("--out", simulate.out_path, "Output CSV (default stdout)");

    BenchCommand bench;
    auto* bench_cmd = app.add_subcommand("bench", "Convert random networks and record timings (CSV)");
    bench_cmd->add_option("--dims", bench.dims, "Input dimensions")->expected(1, -1);
    bench_cmd->add_option("--widths", bench.widths, "Hidden widths")->expected(1, -1);
    bench_cmd->add_option("--depths", bench.depths, "Hidden layer counts")->expected(1, -1);
    bench_cmd->add_option("--trials", bench.trials, "Networks per configuration");
    bench_cmd->add_option("--seed", bench.seed, "Base seed");
    bench_cmd->add_option("--box", bench.box, "Domain box half-width");
    bench_cmd->add_option("--workers", workers, "Worker threads (default: RELU_DISSECT_WORKERS or all cores)");
    bench_cmd->add_option("--out", bench.out_path, "Output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (*convert_cmd) {
        convert.workers = resolve_worker_flag(workers);
        return cmd_convert(convert, std::cout, std::cerr);
    }
    if (*verify_cmd) return cmd_verify(verify, std::cout, std::cerr);
    if (*count_cmd) return cmd_count(count, std::cout, std::cerr);
    if (*export_cmd) return cmd_export(exporter, std::cout, std::cerr);
    if (*grid_cmd) return cmd_plot_grid(grid, std::cout, std::cerr);
    if (*simulate_cmd) return cmd_simulate(simulate, std::cout, std::cerr);
    if (*bench_cmd) {
        bench.workers = resolve_worker_flag(workers);
        return cmd_bench(bench, std::cout, std::cerr);
    }
    return 0;
}
