#include "amerop/pou_approx.hpp"

#include <algorithm>
#include <cmath>

namespace amerop {

using Eigen::MatrixXd;
using Eigen::VectorXd;

CenterGrid make_center_grid(double radius_r, int n_per_dim, int dim) {
    if (!(radius_r > 0.0)) throw DomainError("center grid: radius must be positive");
    if (n_per_dim < 2) throw DomainError("center grid: need at least 2 points per dimension");
    if (dim < 1) throw DomainError("center grid: dimension must be >= 1");
    CenterGrid grid{radius_r, n_per_dim, dim, {}};
    long total = 1;
    for (int k = 0; k < dim; ++k) total *= n_per_dim;
    grid.centers.reserve(total);
    const double h = grid.spacing();
    std::vector<int> idx(dim, 0);
    for (long k = 0; k < total; ++k) {
        VectorXd c(dim);
        for (int j = 0; j < dim; ++j) c[j] = (idx[j] == n_per_dim - 1) ? radius_r : -radius_r + idx[j] * h;
        grid.centers.push_back(c);
        for (int j = 0; j < dim; ++j) {
            if (++idx[j] < n_per_dim) break;
            idx[j] = 0;
        }
    }
    return grid;
}

CenterGrid covering_grid(double radius_r, double delta, int dim) {
    if (!(delta > 0.0)) throw DomainError("covering grid: delta must be positive");
    const int n = static_cast<int>(std::ceil(2.0 * radius_r / delta)) + 1;
    return make_center_grid(radius_r, std::max(n, 2), dim);
}

double phi_center(const VectorXd& x, const VectorXd& center, const CenterGrid& grid) {
    if (x.size() != grid.dim || center.size() != grid.dim) throw ShapeError("phi_center: dimension mismatch");
    const double scale = grid.bump_scale();
    double value = 1.0;
    for (int j = 0; j < grid.dim; ++j) {
        value *= psi(scale * (x[j] - center[j]));
        if (value == 0.0) break;
    }
    return value;
}

namespace {

double tooth(double z) { return z < 0.5 ? 2.0 * z : 2.0 * (1.0 - z); }

}  // namespace

double approx_square(double x, int m) {
    if (m < 1) throw DomainError("approx_square: m must be >= 1");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("approx_square: x must lie in [0,1]");
    double result = x;
    double g = x;
    double weight = 1.0;
    for (int s = 1; s <= m; ++s) {
        g = tooth(g);
        weight *= 0.25;
        result -= weight * g;
    }
    return result;
}

MulApprox approx_mul(double x, double y, int m, double bound) {
    if (!(bound > 0.0)) throw DomainError("approx_mul: bound must be positive");
    if (std::abs(x) > bound || std::abs(y) > bound) throw DomainError("approx_mul: |x| or |y| exceeds the bound");
    const double two_m = 2.0 * bound;
    const double s_sum = approx_square(std::min(1.0, std::abs(x + y) / two_m), m);
    const double s_x = approx_square(std::abs(x) / two_m, m);
    const double s_y = approx_square(std::abs(y) / two_m, m);
    return {2.0 * bound * bound * (s_sum - s_x - s_y), approx_mul_accuracy(m, bound)};
}

namespace {

Mlp affine_net(const MatrixXd& w, const VectorXd& b) {
    Mlp net = Mlp::zeros({static_cast<int>(w.cols()), static_cast<int>(w.rows())});
    net.weights[0] = w;
    net.biases[0] = b;
    return net;
}

// Carries `dim` signed values through `hidden` ReLU layers as (z+, z-).
Mlp identity_net(int dim, int hidden) {
    const MatrixXd eye = MatrixXd::Identity(dim, dim);
    if (hidden == 0) return affine_net(eye, VectorXd::Zero(dim));
    std::vector<int> dims{dim};
    for (int h = 0; h < hidden; ++h) dims.push_back(2 * dim);
    dims.push_back(dim);
    Mlp net = Mlp::zeros(dims);
    net.weights[0] << eye, -eye;
    for (int l = 1; l < hidden; ++l) net.weights[l].setIdentity();
    net.weights[hidden] << eye, -eye;
    return net;
}

// b after a: the output affine of `a` is folded into the first affine of `b`.
Mlp compose(const Mlp& a, const Mlp& b) {
    if (a.output_dim() != b.input_dim()) throw ShapeError("compose: inner dimensions differ");
    Mlp out;
    out.layer_dims.assign(a.layer_dims.begin(), a.layer_dims.end() - 1);
    out.layer_dims.insert(out.layer_dims.end(), b.layer_dims.begin() + 1, b.layer_dims.end());
    for (int l = 0; l + 1 < a.depth(); ++l) {
        out.weights.push_back(a.weights[l]);
        out.biases.push_back(a.biases[l]);
    }
    out.weights.push_back(b.weights[0] * a.weights.back());
    out.biases.push_back(b.weights[0] * a.biases.back() + b.biases[0]);
    for (int l = 1; l < b.depth(); ++l) {
        out.weights.push_back(b.weights[l]);
        out.biases.push_back(b.biases[l]);
    }
    return out;
}

Mlp pad_to_depth(const Mlp& net, int depth) {
    if (net.depth() > depth) throw ShapeError("pad_to_depth: network already deeper");
    if (net.depth() == depth) return net;
    return compose(net, identity_net(net.output_dim(), depth - net.depth()));
}

// Block-diagonal stacking; the shallower network is padded with identity layers.
Mlp parallel(const Mlp& a_in, const Mlp& b_in) {
    const int depth = std::max(a_in.depth(), b_in.depth());
    const Mlp a = pad_to_depth(a_in, depth);
    const Mlp b = pad_to_depth(b_in, depth);
    std::vector<int> dims;
    for (std::size_t l = 0; l < a.layer_dims.size(); ++l) dims.push_back(a.layer_dims[l] + b.layer_dims[l]);
    Mlp out = Mlp::zeros(dims);
    for (int l = 0; l < depth; ++l) {
        const auto& wa = a.weights[l];
        const auto& wb = b.weights[l];
        out.weights[l].topLeftCorner(wa.rows(), wa.cols()) = wa;
        out.weights[l].bottomRightCorner(wb.rows(), wb.cols()) = wb;
        out.biases[l] << a.biases[l], b.biases[l];
    }
    return out;
}

}  // namespace

Mlp square_network(int m) {
    if (m < 1) throw DomainError("square_network: m must be >= 1");
    std::vector<int> dims{1};
    for (int s = 0; s < m; ++s) dims.push_back(3);
    dims.push_back(1);
    Mlp net = Mlp::zeros(dims);
    // Hidden layer s holds (ReLU(g_{s-1}), ReLU(g_{s-1} - 1/2), ReLU(f_{s-1})),
    // with g_s = 2a - 4b the s-fold tooth and f_s = f_{s-1} - g_s / 4^s.
    net.weights[0] << 1.0, 1.0, 1.0;
    net.biases[0] << 0.0, -0.5, 0.0;
    double weight = 1.0;
    for (int s = 1; s <= m; ++s) {
        weight *= 0.25;
        if (s < m) {
            net.weights[s] << 2.0, -4.0, 0.0,
                              2.0, -4.0, 0.0,
                              -2.0 * weight, 4.0 * weight, 1.0;
            net.biases[s] << 0.0, -0.5, 0.0;
        } else {
            net.weights[s] << -2.0 * weight, 4.0 * weight, 1.0;
            net.biases[s] << 0.0;
        }
    }
    return net;
}

Mlp mul_network(int m, double bound) {
    if (!(bound > 0.0)) throw DomainError("mul_network: bound must be positive");
    const double inv = 1.0 / (2.0 * bound);
    MatrixXd w_abs(6, 2);
    w_abs << inv, inv, -inv, -inv, inv, 0.0, -inv, 0.0, 0.0, inv, 0.0, -inv;
    Mlp abs_stage = Mlp::zeros({2, 6, 3});
    abs_stage.weights[0] = w_abs;
    abs_stage.weights[1] << 1.0, 1.0, 0.0, 0.0, 0.0, 0.0,
                            0.0, 0.0, 1.0, 1.0, 0.0, 0.0,
                            0.0, 0.0, 0.0, 0.0, 1.0, 1.0;
    const Mlp sq = square_network(m);
    const Mlp squares = parallel(parallel(sq, sq), sq);
    MatrixXd w_out(1, 3);
    const double c = 2.0 * bound * bound;
    w_out << c, -c, -c;
    return compose(compose(abs_stage, squares), affine_net(w_out, VectorXd::Zero(1)));
}

Mlp psi_network(double scale, double center) {
    Mlp net = Mlp::zeros({1, 4, 1});
    net.weights[0] << scale, scale, scale, scale;
    net.biases[0] << -scale * center + 2.0, -scale * center + 1.0, -scale * center - 1.0, -scale * center - 2.0;
    net.weights[1] << 1.0, -1.0, -1.0, 1.0;
    return net;
}

BumpNetwork product_bump_network(const VectorXd& center, const CenterGrid& grid, int m) {
    const int d = grid.dim;
    if (center.size() != d) throw ShapeError("product_bump_network: center dimension mismatch");
    if (m < 1) throw DomainError("product_bump_network: m must be >= 1");
    const double scale = grid.bump_scale();

    Mlp net = psi_network(scale, center[0]);
    for (int j = 1; j < d; ++j) net = parallel(net, psi_network(scale, center[j]));

    const Mlp mul = mul_network(m, 1.0);
    for (int remaining = d; remaining >= 2; --remaining) {
        Mlp stage = mul;
        if (remaining > 2) stage = parallel(identity_net(remaining - 2, 0), mul);
        net = compose(net, stage);
    }

    const double delta = d > 1 ? approx_mul_accuracy(m, 1.0) : 0.0;
    BumpNetwork out{net, {}, delta};

    // Envelope from the construction: one psi layer, then d-1 products of
    // m+1 hidden layers each.
    NetworkClassSpec& spec = out.spec;
    spec.d_in = d;
    spec.d_out = 1;
    spec.depth_L = 2 + (d - 1) * (m + 1);
    spec.width_p = d == 1 ? 4 : std::max(4 * d, 2 * (d - 2) + 9);
    std::vector<int> dims{d, spec.width_p};
    for (int l = 1; l < spec.depth_L - 1; ++l) dims.push_back(spec.width_p);
    dims.push_back(1);
    spec.sparsity_K = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) spec.sparsity_K += static_cast<long>(dims[l + 1]) * (dims[l] + 1);
    spec.weight_bound_kappa = std::max(1.5 * (grid.n_per_dim - 1) + 2.0, 4.0);
    spec.output_bound_R = 1.0 + d * delta;
    return out;
}

ScalarField piecewise_const_approx(const ScalarField& g, const CenterGrid& grid) {
    std::vector<double> samples;
    samples.reserve(grid.centers.size());
    for (const auto& c : grid.centers) samples.push_back(g(c));

    return [grid, samples = std::move(samples)](const VectorXd& x) -> double {
        if (x.size() != grid.dim) throw ShapeError("piecewise_const_approx: dimension mismatch");
        if (!grid.contains(x)) return 0.0;
        // Only the two nearest centers per axis can have a nonzero bump.
        const double h = grid.spacing();
        const int d = grid.dim;
        std::vector<int> base(d);
        for (int j = 0; j < d; ++j) {
            base[j] = std::clamp(static_cast<int>(std::floor((x[j] + grid.radius_r) / h)), 0, grid.n_per_dim - 2);
        }
        double acc = 0.0;
        for (int corner = 0; corner < (1 << d); ++corner) {
            long flat = 0;
            long stride = 1;
            for (int j = 0; j < d; ++j) {
                flat += stride * (base[j] + ((corner >> j) & 1));
                stride *= grid.n_per_dim;
            }
            const double w = phi_center(x, grid.centers[flat], grid);
            if (w != 0.0) acc += samples[flat] * w;
        }
        return acc;
    };
}

PathApproxError path_approx_error(const std::function<double(double)>& g, const CenterGrid& grid,
                                  const PathBatch& batch) {
    if (grid.dim != 1) throw ShapeError("path_approx_error: paths are one-dimensional");
    const double shift = batch.x0;
    const ScalarField g_centered = [&g, shift](const VectorXd& z) { return g(z[0] + shift); };
    const ScalarField approx = piecewise_const_approx(g_centered, grid);

    PathApproxError err{0.0, 0.0, 0.0};
    VectorXd z(1);
    for (int i = 0; i < batch.n_paths; ++i) {
        double sup_in = 0.0;
        double sup_out = 0.0;
        for (int n = 0; n <= batch.n_steps; ++n) {
            const double x = batch.values(i, n);
            z[0] = x - shift;
            if (std::abs(z[0]) <= grid.radius_r) {
                sup_in = std::max(sup_in, std::abs(g(x) - approx(z)));
            } else {
                sup_out = std::max(sup_out, std::abs(g(x)));
            }
        }
        err.interior += sup_in * sup_in;
        err.tail += sup_out * sup_out;
        const double sup_all = std::max(sup_in, sup_out);
        err.total += sup_all * sup_all;
    }
    err.interior /= batch.n_paths;
    err.tail /= batch.n_paths;
    err.total /= batch.n_paths;
    return err;
}

}  // namespace amerop
