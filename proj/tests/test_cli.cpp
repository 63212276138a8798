#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "relu_dissect/cli.hpp"
#include "relu_dissect/pwa.hpp"
#include "relu_dissect/serialization.hpp"

using namespace relu_dissect;
using namespace relu_dissect::cli;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return (fs::path(RELU_DISSECT_FIXTURES) / name).string(); }

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("relu_dissect_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cells_in(line);
        std::string cell;
        while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// Convert a fixture and return the path of the written PWA file.
std::string converted(const std::string& name, unsigned workers = 1) {
    ConvertCommand cmd;
    cmd.network_path = fixture(name + ".json");
    cmd.workers = workers;
    cmd.out_path = scratch(name + "." + std::to_string(workers) + ".pwa.json");
    std::ostringstream out, log;
    REQUIRE(cmd_convert(cmd, out, log) == kOk);
    return cmd.out_path;
}

}  // namespace

TEST_CASE("convert") {
    CHECK(read_json_file(converted("single_layer"))["regions"].size() == 7);
    CHECK(read_json_file(converted("dense_only"))["regions"].size() == 1);
    CHECK(read_file(converted("swirl", 1)) == read_file(converted("swirl", 6)));
    CHECK(read_file(converted("single_layer", 1)) == read_file(converted("single_layer", 6)));

    ConvertCommand to_stdout;
    to_stdout.network_path = fixture("single_layer.json");
    std::ostringstream out, log;
    CHECK(cmd_convert(to_stdout, out, log) == kOk);
    CHECK(nlohmann::json::parse(out.str())["regions"].size() == 7);
    CHECK(log.str().find("regions: 7") != std::string::npos);

    for (const char* bad : {"unknown_layer.json", "truncated.json", "does_not_exist.json"}) {
        ConvertCommand cmd;
        cmd.network_path = fixture(bad);
        std::ostringstream o, l;
        CHECK(cmd_convert(cmd, o, l) == kSchemaError);
        CHECK(o.str().empty());
        CHECK_FALSE(l.str().empty());
    }

    ConvertCommand empty_box;
    empty_box.network_path = fixture("single_layer.json");
    empty_box.box = -1.0;
    std::ostringstream o, l;
    CHECK(cmd_convert(empty_box, o, l) == kConversionError);
}

TEST_CASE("convert --remove-redundant keeps the function") {
    ConvertCommand cmd;
    cmd.network_path = fixture("swirl.json");
    cmd.remove_redundant = true;
    cmd.out_path = scratch("swirl.reduced.json");
    std::ostringstream out, log;
    REQUIRE(cmd_convert(cmd, out, log) == kOk);
    const PwaFunction reduced = load_pwa(read_json_file(cmd.out_path));
    const PwaFunction full = load_pwa(read_json_file(converted("swirl")));
    REQUIRE(reduced.regions.size() == full.regions.size());
    for (std::size_t k = 0; k < full.regions.size(); ++k)
        CHECK(reduced.regions[k].region.num_rows() <= full.regions[k].region.num_rows());

    VerifyCommand verify;
    verify.network_path = fixture("swirl.json");
    verify.pwa_path = cmd.out_path;
    std::ostringstream vo, vl;
    CHECK(cmd_verify(verify, vo, vl) == kOk);
}

TEST_CASE("verify") {
    VerifyCommand cmd;
    cmd.network_path = fixture("swirl.json");
    cmd.pwa_path = converted("swirl");
    std::ostringstream out, log;
    CHECK(cmd_verify(cmd, out, log) == kOk);
    const auto report = nlohmann::json::parse(out.str());
    CHECK(report["pass"] == true);
    CHECK(report["checks"].size() == 3);

    nlohmann::json doc = read_json_file(cmd.pwa_path);
    doc["regions"][0]["P"][0][0] = doc["regions"][0]["P"][0][0].get<double>() + 1e-3;
    write_text_file(scratch("perturbed.json"), doc.dump());
    cmd.pwa_path = scratch("perturbed.json");
    std::ostringstream o2, l2;
    CHECK(cmd_verify(cmd, o2, l2) == kCheckFailed);
    CHECK(nlohmann::json::parse(o2.str())["pass"] == false);

    doc = read_json_file(converted("swirl"));
    doc["regions"].erase(doc["regions"].begin());
    write_text_file(scratch("holed.json"), doc.dump());
    cmd.pwa_path = scratch("holed.json");
    std::ostringstream o3, l3;
    CHECK(cmd_verify(cmd, o3, l3) == kCheckFailed);

    cmd.pwa_path = fixture("truncated.json");
    std::ostringstream o4, l4;
    CHECK(cmd_verify(cmd, o4, l4) == kSchemaError);

    cmd.network_path = fixture("cube.json");
    cmd.pwa_path = converted("swirl");
    std::ostringstream o5, l5;
    CHECK(cmd_verify(cmd, o5, l5) == kConversionError);
}

TEST_CASE("count") {
    CountCommand cmd;
    cmd.network_path = fixture("single_layer.json");
    cmd.pwa_path = converted("single_layer");
    std::ostringstream out, log;
    CHECK(cmd_count(cmd, out, log) == kOk);
    const auto report = nlohmann::json::parse(out.str());
    CHECK(report["region_count"] == 7);
    CHECK(report["per_layer_bounds"][0] == 7);
}

TEST_CASE("export") {
    ExportCommand cmd;
    cmd.pwa_path = converted("single_layer");
    std::ostringstream out, log;
    CHECK(cmd_export(cmd, out, log) == kOk);
    CHECK(out.str() == read_file(cmd.pwa_path));
}

TEST_CASE("plot-grid") {
    PlotGridCommand cmd;
    cmd.pwa_path = converted("identity");
    cmd.resolution = 3;
    std::ostringstream out, log;
    REQUIRE(cmd_plot_grid(cmd, out, log) == kOk);
    CHECK(out.str().rfind("x1,x2,y,region_index\n", 0) == 0);
    const auto rows = csv_rows(out.str());
    CHECK(rows.size() == 9);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 4);
        CHECK(std::stod(row[2]) == std::stod(row[0]));
    }

    cmd.pwa_path = converted("single_layer");
    cmd.resolution = 101;
    std::ostringstream o2, l2;
    REQUIRE(cmd_plot_grid(cmd, o2, l2) == kOk);
    const PwaFunction pwa = load_pwa(read_json_file(cmd.pwa_path));
    std::set<std::string> regions;
    for (const auto& row : csv_rows(o2.str())) {
        regions.insert(row[3]);
        const Eigen::Vector2d x(std::stod(row[0]), std::stod(row[1]));
        CHECK(std::stod(row[2]) == doctest::Approx(eval_pwa(pwa, x)(0)).epsilon(1e-15));
    }
    CHECK(regions.size() == 7);

    cmd.pwa_path = converted("cube");
    std::ostringstream o3, l3;
    CHECK(cmd_plot_grid(cmd, o3, l3) == kNotPlanar);

    cmd.pwa_path = converted("single_layer");
    cmd.output_index = 3;
    std::ostringstream o4, l4;
    CHECK(cmd_plot_grid(cmd, o4, l4) == kConversionError);
}

TEST_CASE("simulate") {
    SimulateCommand cmd;
    cmd.pwa_path = converted("decay");
    cmd.x0 = {1.0, -2.0};
    cmd.out_path = scratch("decay.csv");
    std::ostringstream out, log;
    REQUIRE(cmd_simulate(cmd, out, log) == kOk);
    const auto rows = csv_rows(read_file(cmd.out_path));
    REQUIRE(rows.size() == 1001);
    double worst = 0.0;
    for (const auto& row : rows) {
        const double t = std::stod(row[0]);
        worst = std::max(worst, std::abs(std::stod(row[1]) - std::exp(-t)));
        worst = std::max(worst, std::abs(std::stod(row[2]) + 2.0 * std::exp(-t)));
    }
    CHECK(worst < 1e-6);
    CHECK(std::stod(rows.back()[0]) == doctest::Approx(1.0));

    cmd.pwa_path = converted("zero_field");
    cmd.out_path.clear();
    std::ostringstream o2, l2;
    REQUIRE(cmd_simulate(cmd, o2, l2) == kOk);
    for (const auto& row : csv_rows(o2.str())) {
        CHECK(std::stod(row[1]) == 1.0);
        CHECK(std::stod(row[2]) == -2.0);
    }

    // non-positive step and a field that pushes the state out of the box
    cmd.pwa_path = converted("decay");
    cmd.x0 = {5.0, 5.0};
    cmd.dt = -0.01;
    std::ostringstream o3, l3;
    CHECK(cmd_simulate(cmd, o3, l3) == kConversionError);
    cmd.pwa_path = converted("identity");
    cmd.dt = 0.01;
    std::ostringstream o4, l4;
    CHECK(cmd_simulate(cmd, o4, l4) == kLeftDomain);
    CHECK(csv_rows(o4.str()).size() < 1001);

    cmd.x0 = {1.0};
    std::ostringstream o5, l5;
    CHECK(cmd_simulate(cmd, o5, l5) == kConversionError);
}

TEST_CASE("simulate switches regions only at stored boundaries") {
    SimulateCommand cmd;
    cmd.pwa_path = converted("swirl");
    cmd.x0 = {1.0, 1.0};
    cmd.dt = 0.01;
    cmd.steps = 2000;
    std::ostringstream out, log;
    REQUIRE(cmd_simulate(cmd, out, log) == kOk);
    const PwaFunction pwa = load_pwa(read_json_file(cmd.pwa_path));
    const auto rows = csv_rows(out.str());
    int switches = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k][3] == rows[k - 1][3]) continue;
        ++switches;
        const Eigen::Vector2d prev(std::stod(rows[k - 1][1]), std::stod(rows[k - 1][2]));
        const Eigen::Vector2d next(std::stod(rows[k][1]), std::stod(rows[k][2]));
        // the step leaves the previous region through one of its facets
        const auto& left = pwa.regions[std::stoul(rows[k - 1][3])].region;
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < left.num_rows(); ++i) {
            const Halfspace h = left.row(i);
            nearest = std::min(nearest, std::abs(h.value(next)) / h.normal.norm());
        }
        CHECK(nearest <= (next - prev).norm() + 1e-7);
        CHECK(contains(pwa.regions[std::stoul(rows[k][3])].region, next));
    }
    CHECK(switches > 0);
}

TEST_CASE("bench") {
    BenchCommand cmd;
    cmd.dims = {2};
    cmd.widths = {3};
    cmd.depths = {0, 1};
    cmd.trials = 3;
    std::ostringstream out, log;
    REQUIRE(cmd_bench(cmd, out, log) == kOk);
    CHECK(out.str().rfind("d,widths,depth,trial,region_count,wall_time_s,workers\n", 0) == 0);
    const auto rows = csv_rows(out.str());
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 7);
        if (row[2] == "0") {
            CHECK(row[4] == "1");
        } else {
            CHECK(std::stoi(row[4]) <= 7);
            CHECK(std::stoi(row[4]) >= 1);
        }
    }

    std::ostringstream again, again_log;
    cmd_bench(cmd, again, again_log);
    auto counts = [](const std::string& csv) {
        std::vector<std::string> c;
        for (const auto& row : csv_rows(csv)) c.push_back(row[4]);
        return c;
    };
    CHECK(counts(out.str()) == counts(again.str()));
}

TEST_CASE("worker count resolution") {
    ::unsetenv("RELU_DISSECT_WORKERS");
    CHECK(resolve_worker_flag(std::nullopt) == 0);
    CHECK(resolve_worker_flag(3u) == 3);
    ::setenv("RELU_DISSECT_WORKERS", "5", 1);
    CHECK(resolve_worker_flag(std::nullopt) == 5);
    CHECK(resolve_worker_flag(2u) == 2);
    ::setenv("RELU_DISSECT_WORKERS", "many", 1);
    CHECK(resolve_worker_flag(std::nullopt) == 0);
    ::unsetenv("RELU_DISSECT_WORKERS");
}

TEST_CASE("cleanup") { fs::remove_all(scratch_dir()); }
