#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace relu_dissect {

/// Affine layer z = W x + b, W stored out x in.
struct DenseLayer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;

    Eigen::Index in_width() const { return weights.cols(); }
    Eigen::Index out_width() const { return weights.rows(); }
};

/// Elementwise max(0, z). Keeps the width of its input.
struct Relu {};

using LayerNode = std::variant<DenseLayer, Relu>;

/// A feedforward network as an ordered list of dense and ReLU nodes.
/// Immutable once constructed; the constructor validates the width chain.
class Network {
  public:
    /// Throws DimensionChainError if widths do not chain (the message names the
    /// offending layer index), NonFiniteWeight for NaN/inf parameters and
    /// SchemaError for an empty layer list or input_dim < 1.
    Network(Eigen::Index input_dim, std::vector<LayerNode> layers);

    Eigen::Index input_dim() const { return input_dim_; }
    Eigen::Index output_dim() const { return output_dim_; }
    const std::vector<LayerNode>& layers() const { return layers_; }

    /// Width entering layer i (input_dim for i = 0).
    Eigen::Index width_before(std::size_t i) const { return widths_[i]; }

    std::size_t relu_neuron_count() const;

  private:
    Eigen::Index input_dim_;
    Eigen::Index output_dim_;
    std::vector<LayerNode> layers_;
    std::vector<Eigen::Index> widths_;
};

/// [[W, b], [0, 1]] of size (out+1) x (in+1).
Eigen::MatrixXd homogeneous(const DenseLayer& layer);

/// Plain affine/ReLU evaluation. Throws DimensionMismatch or NonFiniteInput.
Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x);

/// Pre-activations entering every ReLU node, concatenated in network order.
Eigen::VectorXd relu_preactivations(const Network& net, const Eigen::VectorXd& x);

/// Hidden-layer shape for random_network.
struct RandomNetworkShape {
    Eigen::Index input_dim = 2;
    std::vector<Eigen::Index> hidden_widths;  // each followed by a ReLU node
    Eigen::Index output_dim = 1;
};

/// Weights i.i.d. standard normal, biases uniform on (-1, 1). The output
/// layer is dense without activation.
Network random_network(const RandomNetworkShape& shape, std::uint64_t seed);

}  // namespace relu_dissect
