#pragma once

#include <algorithm>
#include <cmath>

#include "amerop/mlp.hpp"

namespace amerop::testing {

/// Largest relative error between backprop gradients and central differences
/// of the MSE loss. Components whose gradients are both below `floor` are
/// compared absolutely.
inline double gradient_check(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double h = 1e-5,
                             double floor = 1e-7) {
    const auto analytic = mlp_backward(net, x, y).grads;
    auto loss = [&](const Mlp& n) { return (n.forward_batch(x) - y).squaredNorm() / static_cast<double>(y.size()); };
    double worst = 0.0;
    Mlp probe = net;
    auto compare = [&](double& param, double grad) {
        const double keep = param;
        param = keep + h;
        const double up = loss(probe);
        param = keep - h;
        const double down = loss(probe);
        param = keep;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(numeric), std::abs(grad), floor});
        worst = std::max(worst, std::abs(numeric - grad) / scale);
    };
    for (int l = 0; l < net.depth(); ++l) {
        for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
            compare(probe.weights[l].data()[i], analytic.weights[l].data()[i]);
        }
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
            compare(probe.biases[l].data()[i], analytic.biases[l].data()[i]);
        }
    }
    return worst;
}

}  // namespace amerop::testing
