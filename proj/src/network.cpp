#include "relu_dissect/network.hpp"

#include <random>
#include <string>

#include "relu_dissect/errors.hpp"

namespace relu_dissect {

Network::Network(Eigen::Index input_dim, std::vector<LayerNode> layers)
    : input_dim_(input_dim), output_dim_(input_dim), layers_(std::move(layers)) {
    if (input_dim_ < 1) throw SchemaError("input_dim must be at least 1");
    if (layers_.empty()) throw SchemaError("network needs at least one layer");

    Eigen::Index width = input_dim_;
    widths_.reserve(layers_.size() + 1);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        widths_.push_back(width);
        if (const auto* dense = std::get_if<DenseLayer>(&layers_[i])) {
            const std::string where = "layer " + std::to_string(i) + ": ";
            if (dense->weights.rows() < 1)
                throw DimensionChainError(where + "dense layer has no output rows");
            if (dense->in_width() != width)
                throw DimensionChainError(where + "weights have " + std::to_string(dense->in_width()) +
                                          " columns, incoming width is " + std::to_string(width));
            if (dense->bias.size() != dense->out_width())
                throw DimensionChainError(where + "bias has " + std::to_string(dense->bias.size()) +
                                          " entries, weights have " + std::to_string(dense->out_width()) +
                                          " rows");
            if (!dense->weights.allFinite() || !dense->bias.allFinite())
                throw NonFiniteWeight(where + "non-finite weight or bias");
            width = dense->out_width();
        }
    }
    widths_.push_back(width);
    output_dim_ = width;
}

std::size_t Network::relu_neuron_count() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i)
        if (std::holds_alternative<Relu>(layers_[i])) count += static_cast<std::size_t>(widths_[i]);
    return count;
}

Eigen::MatrixXd homogeneous(const DenseLayer& layer) {
    const Eigen::Index out = layer.out_width();
    const Eigen::Index in = layer.in_width();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(out + 1, in + 1);
    t.topLeftCorner(out, in) = layer.weights;
    t.topRightCorner(out, 1) = layer.bias;
    t(out, in) = 1.0;
    return t;
}

namespace {

void check_input(const Network& net, const Eigen::VectorXd& x) {
    if (x.size() != net.input_dim())
        throw DimensionMismatch("input has " + std::to_string(x.size()) + " entries, network expects " +
                                std::to_string(net.input_dim()));
    if (!x.allFinite()) throw NonFiniteInput("input contains non-finite values");
}

}  // namespace

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x) {
    check_input(net, x);
    Eigen::VectorXd z = x;
    for (const auto& node : net.layers()) {
        if (const auto* dense = std::get_if<DenseLayer>(&node))
            z = dense->weights * z + dense->bias;
        else
            z = z.cwiseMax(0.0);
    }
    return z;
}

Eigen::VectorXd relu_preactivations(const Network& net, const Eigen::VectorXd& x) {
    check_input(net, x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(net.relu_neuron_count()));
    Eigen::Index filled = 0;
    Eigen::VectorXd z = x;
    for (const auto& node : net.layers()) {
        if (const auto* dense = std::get_if<DenseLayer>(&node)) {
            z = dense->weights * z + dense->bias;
        } else {
            out.segment(filled, z.size()) = z;
            filled += z.size();
            z = z.cwiseMax(0.0);
        }
    }
    return out;
}

Network random_network(const RandomNetworkShape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);

    auto dense = [&](Eigen::Index out, Eigen::Index in) {
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
        for (Eigen::Index i = 0; i < out; ++i)
            for (Eigen::Index j = 0; j < in; ++j) layer.weights(i, j) = normal(rng);
        for (Eigen::Index i = 0; i < out; ++i) layer.bias(i) = uniform(rng);
        return layer;
    };

    std::vector<LayerNode> layers;
    Eigen::Index width = shape.input_dim;
    for (Eigen::Index hidden : shape.hidden_widths) {
        layers.emplace_back(dense(hidden, width));
        layers.emplace_back(Relu{});
        width = hidden;
    }
    layers.emplace_back(dense(shape.output_dim, width));
    return Network(shape.input_dim, std::move(layers));
}

}  // namespace relu_dissect
