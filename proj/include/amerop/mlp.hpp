#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "amerop/errors.hpp"

namespace amerop {

/// Dense feed-forward network: ReLU on hidden layers, identity on output.
/// weights[l] is layer_dims[l+1] x layer_dims[l]. Batched inputs are
/// column-per-sample.
template <typename Scalar>
struct BasicMlp {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    std::vector<int> layer_dims;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    [[nodiscard]] int depth() const { return static_cast<int>(weights.size()); }
    [[nodiscard]] int input_dim() const { return layer_dims.front(); }
    [[nodiscard]] int output_dim() const { return layer_dims.back(); }

    /// Zero parameters with the given shape.
    static BasicMlp zeros(const std::vector<int>& dims) {
        if (dims.size() < 2) throw DomainError("mlp: need at least input and output dims");
        BasicMlp net;
        net.layer_dims = dims;
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            if (dims[l] < 1 || dims[l + 1] < 1) throw DomainError("mlp: layer dims must be positive");
            net.weights.push_back(Matrix::Zero(dims[l + 1], dims[l]));
            net.biases.push_back(Vector::Zero(dims[l + 1]));
        }
        return net;
    }

    BasicMlp zeros_like() const { return zeros(layer_dims); }

    [[nodiscard]] long parameter_count() const {
        long n = 0;
        for (int l = 0; l < depth(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }

    [[nodiscard]] Matrix forward_batch(const Matrix& inputs) const {
        if (inputs.rows() != input_dim()) throw ShapeError("mlp forward: input dimension mismatch");
        Matrix a = inputs;
        for (int l = 0; l < depth(); ++l) {
            Matrix z = weights[l] * a;
            z.colwise() += biases[l];
            if (l + 1 < depth()) z = z.cwiseMax(Scalar(0));
            a = std::move(z);
        }
        return a;
    }

    [[nodiscard]] Vector forward(const Vector& x) const { return forward_batch(x); }
};

using Mlp = BasicMlp<double>;

/// He-normal weights (variance 2/fan_in), zero biases.
template <typename Scalar = double>
BasicMlp<Scalar> mlp_init(const std::vector<int>& layer_dims, std::uint64_t seed) {
    auto net = BasicMlp<Scalar>::zeros(layer_dims);
    std::mt19937_64 rng(seed);
    for (int l = 0; l < net.depth(); ++l) {
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / layer_dims[l]));
        auto& w = net.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = static_cast<Scalar>(normal(rng));
        }
    }
    return net;
}

/// Pre-activations and activations kept for the reverse pass.
template <typename Scalar>
struct ForwardCache {
    std::vector<typename BasicMlp<Scalar>::Matrix> activations;  // activations[0] = inputs
    std::vector<typename BasicMlp<Scalar>::Matrix> pre;          // pre[l] = W_l a_l + b_l
    [[nodiscard]] const auto& output() const { return pre.back(); }
};

template <typename Scalar>
ForwardCache<Scalar> forward_cached(const BasicMlp<Scalar>& net, const typename BasicMlp<Scalar>::Matrix& inputs) {
    if (inputs.rows() != net.input_dim()) throw ShapeError("mlp forward: input dimension mismatch");
    ForwardCache<Scalar> cache;
    cache.activations.reserve(net.depth());
    cache.pre.reserve(net.depth());
    cache.activations.push_back(inputs);
    for (int l = 0; l < net.depth(); ++l) {
        typename BasicMlp<Scalar>::Matrix z = net.weights[l] * cache.activations.back();
        z.colwise() += net.biases[l];
        cache.pre.push_back(z);
        if (l + 1 < net.depth()) cache.activations.push_back(z.cwiseMax(Scalar(0)));
    }
    return cache;
}

/// Reverse pass given dLoss/dOutput. ReLU'(0) is taken as 0. When
/// input_grad is non-null it receives dLoss/dInputs.
template <typename Scalar>
BasicMlp<Scalar> backward_from_output(const BasicMlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                                      const typename BasicMlp<Scalar>::Matrix& output_grad,
                                      typename BasicMlp<Scalar>::Matrix* input_grad = nullptr) {
    using Matrix = typename BasicMlp<Scalar>::Matrix;
    if (output_grad.rows() != net.output_dim() || output_grad.cols() != cache.pre.back().cols()) {
        throw ShapeError("mlp backward: output gradient shape mismatch");
    }
    auto grads = net.zeros_like();
    Matrix delta = output_grad;
    for (int l = net.depth() - 1; l >= 0; --l) {
        grads.weights[l].noalias() = delta * cache.activations[l].transpose();
        grads.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            Matrix back = net.weights[l].transpose() * delta;
            delta = back.cwiseProduct((cache.pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
        } else if (input_grad != nullptr) {
            *input_grad = net.weights[0].transpose() * delta;
        }
    }
    return grads;
}

template <typename Scalar>
struct LossAndGrads {
    Scalar loss;
    BasicMlp<Scalar> grads;
};

/// Mean squared error over every output entry of the batch, with exact
/// reverse-mode gradients.
template <typename Scalar>
LossAndGrads<Scalar> mlp_backward(const BasicMlp<Scalar>& net, const typename BasicMlp<Scalar>::Matrix& inputs,
                                  const typename BasicMlp<Scalar>::Matrix& targets) {
    if (targets.rows() != net.output_dim() || targets.cols() != inputs.cols()) {
        throw ShapeError("mlp_backward: target shape mismatch");
    }
    const auto cache = forward_cached(net, inputs);
    const typename BasicMlp<Scalar>::Matrix diff = cache.output() - targets;
    const Scalar count = static_cast<Scalar>(diff.size());
    const Scalar loss = diff.squaredNorm() / count;
    return {loss, backward_from_output(net, cache, typename BasicMlp<Scalar>::Matrix((Scalar(2) / count) * diff))};
}

struct TrainConfig {
    double learning_rate = 1e-3;
    /// Learning rate reached at the last epoch; the rate decays
    /// geometrically per epoch. Equal to learning_rate means constant.
    double final_learning_rate = 1e-3;
    int epochs = 300;
    int batch_size = 4096;
    std::uint64_t seed = 7;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_stability = 1e-8;

    void validate() const {
        if (!(learning_rate > 0.0)) throw DomainError("train config: learning_rate must be positive");
        if (!(final_learning_rate > 0.0)) throw DomainError("train config: final_learning_rate must be positive");
        if (epochs < 1) throw DomainError("train config: epochs must be >= 1");
        if (batch_size < 1) throw DomainError("train config: batch_size must be >= 1");
        if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
            throw DomainError("train config: beta1 and beta2 must lie in (0,1)");
        }
        if (!(eps_stability > 0.0)) throw DomainError("train config: eps_stability must be positive");
    }

    [[nodiscard]] double learning_rate_at(int epoch) const {
        if (epochs <= 1) return learning_rate;
        const double frac = static_cast<double>(epoch) / (epochs - 1);
        return learning_rate * std::pow(final_learning_rate / learning_rate, frac);
    }
};

template <typename Scalar>
struct AdamState {
    BasicMlp<Scalar> first_moment;
    BasicMlp<Scalar> second_moment;
    long step = 0;

    static AdamState for_net(const BasicMlp<Scalar>& net) { return {net.zeros_like(), net.zeros_like(), 0}; }
};

/// Bias-corrected adaptive-moment update, in place.
template <typename Scalar>
void adam_step(BasicMlp<Scalar>& net, const BasicMlp<Scalar>& grads, AdamState<Scalar>& state,
               const TrainConfig& config) {
    if (grads.layer_dims != net.layer_dims || state.first_moment.layer_dims != net.layer_dims) {
        throw ShapeError("adam_step: parameter shapes differ");
    }
    ++state.step;
    const Scalar b1 = static_cast<Scalar>(config.beta1);
    const Scalar b2 = static_cast<Scalar>(config.beta2);
    const Scalar correction1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
    const Scalar correction2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
    const Scalar lr = static_cast<Scalar>(config.learning_rate);
    const Scalar eps = static_cast<Scalar>(config.eps_stability);

    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
    };
    for (int l = 0; l < net.depth(); ++l) {
        update(net.weights[l], grads.weights[l], state.first_moment.weights[l], state.second_moment.weights[l]);
        update(net.biases[l], grads.biases[l], state.first_moment.biases[l], state.second_moment.biases[l]);
    }
}

/// Parameter envelope of a ReLU network class.
struct NetworkClassSpec {
    int d_in = 1;
    int d_out = 1;
    int depth_L = 1;
    int width_p = 1;
    long sparsity_K = 0;
    double weight_bound_kappa = 1.0;
    double output_bound_R = 1.0;
};

struct ClassAudit {
    int depth = 0;
    int max_width = 0;
    long nonzero_params = 0;
    double max_abs_param = 0.0;
    double max_abs_output = 0.0;

    bool dims_ok = false;
    bool depth_ok = false;
    bool width_ok = false;
    bool sparsity_ok = false;
    bool kappa_ok = false;
    bool output_ok = false;

    [[nodiscard]] bool pass() const {
        return dims_ok && depth_ok && width_ok && sparsity_ok && kappa_ok && output_ok;
    }
};

/// Width counts every non-input layer. domain_sample is column-per-point.
template <typename Scalar>
ClassAudit audit_class(const BasicMlp<Scalar>& net, const NetworkClassSpec& spec,
                       const typename BasicMlp<Scalar>::Matrix& domain_sample) {
    ClassAudit a;
    a.depth = net.depth();
    for (std::size_t l = 1; l < net.layer_dims.size(); ++l) a.max_width = std::max(a.max_width, net.layer_dims[l]);
    for (int l = 0; l < net.depth(); ++l) {
        a.nonzero_params += (net.weights[l].array() != Scalar(0)).count();
        a.nonzero_params += (net.biases[l].array() != Scalar(0)).count();
        a.max_abs_param = std::max<double>(a.max_abs_param, net.weights[l].cwiseAbs().maxCoeff());
        a.max_abs_param = std::max<double>(a.max_abs_param, net.biases[l].cwiseAbs().maxCoeff());
    }
    if (domain_sample.cols() > 0) a.max_abs_output = net.forward_batch(domain_sample).cwiseAbs().maxCoeff();

    a.dims_ok = net.input_dim() == spec.d_in && net.output_dim() == spec.d_out;
    a.depth_ok = a.depth <= spec.depth_L;
    a.width_ok = a.max_width <= spec.width_p;
    a.sparsity_ok = a.nonzero_params <= spec.sparsity_K;
    a.kappa_ok = a.max_abs_param <= spec.weight_bound_kappa;
    a.output_ok = a.max_abs_output <= spec.output_bound_R;
    return a;
}

// Checkpoint format: "DNOP", u32 version, u32 layer count, u32 dims,
// then f64 weights (row-major, layer order) and f64 biases (layer order).
inline constexpr std::uint32_t kMlpFormatVersion = 1;

std::vector<std::uint8_t> encode_mlp(const Mlp& net);
Mlp decode_mlp(const std::vector<std::uint8_t>& bytes);

/// Body of the record (layer count onward), shared by composite checkpoints.
void append_mlp_body(std::vector<std::uint8_t>& out, const Mlp& net);
class ByteReader;
Mlp read_mlp_body(ByteReader& in);

}  // namespace amerop
