#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "relu_dissect/errors.hpp"
#include "relu_dissect/network.hpp"
#include "relu_dissect/serialization.hpp"

using namespace relu_dissect;
using nlohmann::json;

namespace {

const json kSchemaExample = json::parse(R"({
  "input_dim": 2,
  "layers": [
    {"type": "dense", "weights": [[1.0, -2.0], [0.5, 0.25], [3.0, 1.0]], "bias": [0.0, 1.0, -1.0]},
    {"type": "relu"},
    {"type": "dense", "weights": [[1.0, 1.0, 1.0]], "bias": [0.5]}
  ]
})");

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("homogeneous layer matrix") {
    DenseLayer scalar{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, 3.0)};
    Eigen::Matrix2d expected;
    expected << 2, 3, 0, 1;
    CHECK(homogeneous(scalar) == expected);

    DenseLayer identity{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)};
    CHECK(homogeneous(identity) == Eigen::MatrixXd::Identity(3, 3));

    const Network net = random_network({2, {}, 3}, 5);
    const auto& layer = std::get<DenseLayer>(net.layers()[0]);
    const Eigen::MatrixXd t = homogeneous(layer);
    REQUIRE(t.rows() == 4);
    REQUIRE(t.cols() == 3);
    CHECK(t.row(3) == Eigen::RowVector3d(0, 0, 1));
    std::mt19937_64 rng(1);
    for (int s = 0; s < 100; ++s) {
        const Eigen::VectorXd x = oracle::uniform_point(rng, 2, 5.0);
        Eigen::VectorXd xh(3);
        xh << x, 1.0;
        const Eigen::VectorXd via_t = t * xh;
        CHECK((via_t.head(3) - (layer.weights * x + layer.bias)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(via_t(3) == 1.0);
    }
}

TEST_CASE("forward examples") {
    Network identity(3, {DenseLayer{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)}});
    const Eigen::Vector3d x(1.5, -2.0, 0.25);
    CHECK(forward(identity, x) == x);

    Network split(1, {DenseLayer{(Eigen::MatrixXd(2, 1) << 1, -1).finished(), Eigen::VectorXd::Zero(2)}, Relu{}});
    CHECK(forward(split, Eigen::VectorXd::Constant(1, 2.0)) == Eigen::Vector2d(2, 0));

    CHECK_THROWS_AS(forward(identity, Eigen::Vector2d(1, 2)), DimensionMismatch);
    CHECK_THROWS_AS(forward(identity, Eigen::Vector3d(1, std::nan(""), 2)), NonFiniteInput);
}

TEST_CASE("forward matches an independent evaluator") {
    const json doc = oracle::random_network_doc(2, {16, 16}, 2, 77);
    const Network net = load_network(doc);
    std::mt19937_64 rng(2);
    for (int s = 0; s < 100; ++s) {
        const Eigen::VectorXd x = oracle::uniform_point(rng, 2, 10.0);
        const Eigen::VectorXd expected = to_eigen(oracle::json_forward(doc, {x(0), x(1)}));
        CHECK((forward(net, x) - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dense-only network is one matrix product") {
    const Network net = random_network({3, {}, 2}, 8);
    std::vector<LayerNode> layers = net.layers();
    layers.push_back(DenseLayer{Eigen::MatrixXd::Random(4, 2), Eigen::VectorXd::Random(4)});
    layers.push_back(DenseLayer{Eigen::MatrixXd::Random(2, 4), Eigen::VectorXd::Random(2)});
    const Network deep(3, layers);
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(4, 4);
    for (const auto& node : deep.layers()) product = homogeneous(std::get<DenseLayer>(node)) * product;
    std::mt19937_64 rng(3);
    for (int s = 0; s < 100; ++s) {
        const Eigen::VectorXd x = oracle::uniform_point(rng, 3, 10.0);
        Eigen::VectorXd xh(4);
        xh << x, 1.0;
        CHECK((forward(deep, x) - (product * xh).head(2)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("inserting an identity layer leaves outputs unchanged") {
    const Network net = random_network({2, {5, 4}, 2}, 9);
    std::vector<LayerNode> layers = net.layers();
    layers.insert(layers.begin() + 2, DenseLayer{Eigen::MatrixXd::Identity(5, 5), Eigen::VectorXd::Zero(5)});
    const Network padded(2, layers);
    std::mt19937_64 rng(4);
    for (int s = 0; s < 100; ++s) {
        const Eigen::VectorXd x = oracle::uniform_point(rng, 2, 10.0);
        CHECK((forward(net, x) - forward(padded, x)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("forward is continuous along random segments") {
    const Network net = random_network({2, {8, 8}, 1}, 10);
    std::mt19937_64 rng(5);
    auto max_jump = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b, int steps) {
        double jump = 0.0;
        Eigen::VectorXd prev = forward(net, a);
        for (int i = 1; i <= steps; ++i) {
            const Eigen::VectorXd y = forward(net, a + (b - a) * (static_cast<double>(i) / steps));
            jump = std::max(jump, (y - prev).cwiseAbs().maxCoeff());
            prev = y;
        }
        return jump;
    };
    for (int s = 0; s < 100; ++s) {
        const Eigen::VectorXd a = oracle::uniform_point(rng, 2, 10.0);
        const Eigen::VectorXd b = oracle::uniform_point(rng, 2, 10.0);
        const double coarse = max_jump(a, b, 500);
        const double fine = max_jump(a, b, 1000);
        // halving the step roughly halves the largest jump (no discontinuities)
        CHECK(fine <= 0.6 * coarse + 1e-12);
    }
}

TEST_CASE("network validation") {
    CHECK_THROWS_AS(Network(2, {}), SchemaError);
    CHECK_THROWS_AS(Network(0, {Relu{}}), SchemaError);
    CHECK_THROWS_AS(Network(2, {DenseLayer{Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(2)}}),
                    DimensionChainError);
    DenseLayer bad{Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Ones(1)};
    bad.weights(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Network(2, {bad}), NonFiniteWeight);

    const Network net = load_network(kSchemaExample);
    CHECK(net.input_dim() == 2);
    CHECK(net.output_dim() == 1);
    CHECK(net.relu_neuron_count() == 3);
    CHECK(net.width_before(2) == 3);
}

TEST_CASE("load_network") {
    const Network net = load_network(kSchemaExample);
    int dense = 0;
    for (const auto& node : net.layers()) dense += std::holds_alternative<DenseLayer>(node);
    CHECK(dense == 2);
    CHECK(net.layers().size() == 3);

    json bias_mismatch = json::parse(R"({"input_dim": 2, "layers": [
        {"type": "dense", "weights": [[1, 0], [0, 1]], "bias": [0, 0]},
        {"type": "dense", "weights": [[1, 1]], "bias": [0, 1]}]})");
    try {
        load_network(bias_mismatch);
        FAIL("expected DimensionChainError");
    } catch (const DimensionChainError& e) {
        CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
    }

    json unknown = kSchemaExample;
    unknown["layers"][1]["type"] = "leaky_relu";
    CHECK_THROWS_AS(load_network(unknown), SchemaError);

    json missing = kSchemaExample;
    missing["layers"][0].erase("bias");
    CHECK_THROWS_AS(load_network(missing), SchemaError);

    json no_dim = kSchemaExample;
    no_dim.erase("input_dim");
    CHECK_THROWS_AS(load_network(no_dim), SchemaError);

    json text = kSchemaExample;
    text["layers"][0]["weights"][0][0] = "one";
    CHECK_THROWS_AS(load_network(text), SchemaError);

    json nan = kSchemaExample;
    nan["layers"][0]["weights"][0][0] = std::nan("");
    CHECK_THROWS_AS(load_network(nan), NonFiniteWeight);
}

TEST_CASE("save(load(doc)) reproduces the document") {
    CHECK(save_network(load_network(kSchemaExample)) == kSchemaExample);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const json doc = oracle::random_network_doc(1 + static_cast<int>(seed % 4), {3, 5}, 2, seed);
        const json saved = save_network(load_network(doc));
        CHECK(saved == doc);
        CHECK(saved.dump() == save_network(load_network(saved)).dump());
    }
}

TEST_CASE("random_network shape and determinism") {
    const Network a = random_network({3, {4, 5}, 2}, 12);
    const Network b = random_network({3, {4, 5}, 2}, 12);
    CHECK(save_network(a) == save_network(b));
    CHECK(a.layers().size() == 5);
    CHECK(a.output_dim() == 2);
    const auto& first = std::get<DenseLayer>(a.layers()[0]);
    CHECK((first.bias.array().abs() < 1.0).all());
}
