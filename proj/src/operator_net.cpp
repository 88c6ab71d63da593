#include "amerop/operator_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "amerop/errors.hpp"
#include "amerop/seeding.hpp"
#include "amerop/surface_io.hpp"

namespace amerop {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SensorSet SensorSet::equispaced(double x_min, double x_max, int count) {
    if (count < 2) throw DomainError("sensors: need at least two points");
    if (!(x_max > x_min)) throw DomainError("sensors: x_max must exceed x_min");
    SensorSet s;
    s.points.resize(count);
    const double step = (x_max - x_min) / (count - 1);
    for (int i = 0; i < count; ++i) s.points[i] = x_min + i * step;
    s.points[count - 1] = x_max;
    return s;
}

OperatorModel make_operator_model(const OperatorArchitecture& arch, const GridSpec& grid, double value_scale,
                                  std::uint64_t seed) {
    if (arch.latent < 1) throw DomainError("operator: latent dimension must be >= 1");
    if (!(value_scale > 0.0)) throw DomainError("operator: value_scale must be positive");
    std::vector<int> branch_dims{arch.n_sensors};
    branch_dims.insert(branch_dims.end(), arch.branch_hidden.begin(), arch.branch_hidden.end());
    branch_dims.push_back(arch.latent);
    std::vector<int> trunk_dims{2};
    trunk_dims.insert(trunk_dims.end(), arch.trunk_hidden.begin(), arch.trunk_hidden.end());
    trunk_dims.push_back(arch.latent);

    OperatorModel model;
    model.branch = mlp_init(branch_dims, derive_seed(seed, "init.branch"));
    model.trunk = mlp_init(trunk_dims, derive_seed(seed, "init.trunk"));
    model.latent = arch.latent;
    model.sensors = SensorSet::equispaced(grid.x_min, grid.x_max, arch.n_sensors);
    model.norm = {grid.maturity, grid.x_min, grid.x_max, value_scale, grid.n_space, grid.n_time};
    return model;
}

NetworkClassSpec trunk_class_spec(const OperatorModel& model, double kappa, double output_bound) {
    const auto& dims = model.trunk.layer_dims;
    return {dims.front(), dims.back(), model.trunk.depth(), *std::max_element(dims.begin() + 1, dims.end()),
            static_cast<long>(model.trunk.parameter_count()), kappa, output_bound};
}

VectorXd encode_payoff(const PayoffFn& payoff, const SensorSet& sensors, double value_scale) {
    VectorXd v(sensors.points.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = payoff(sensors.points[i]) / value_scale;
    return v;
}

VectorXd encode_payoff(const PutPayoff& payoff, const SensorSet& sensors, double value_scale) {
    return encode_payoff(PayoffFn([&payoff](double x) { return payoff(x); }), sensors, value_scale);
}

namespace {

// Normalized (t, x) features for every lattice node, node index n * n_space + j.
MatrixXd node_features(const GridSpec& grid, const Normalization& norm) {
    const int m = (grid.n_time + 1) * grid.n_space;
    MatrixXd f(2, m);
    for (int n = 0; n <= grid.n_time; ++n) {
        for (int j = 0; j < grid.n_space; ++j) {
            const int idx = n * grid.n_space + j;
            f(0, idx) = norm.t_in(grid.time(n));
            f(1, idx) = norm.x_in(grid.price(j));
        }
    }
    return f;
}

// Row i holds surface `surfaces[i]` flattened node-major, divided by value_scale.
MatrixXd node_targets(const SurfaceDataset& data, const std::vector<int>& surfaces, double value_scale) {
    const int m = (data.grid.n_time + 1) * data.grid.n_space;
    MatrixXd y(surfaces.size(), m);
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        const auto& v = data.surfaces[surfaces[i]].values;
        for (int n = 0; n < v.rows(); ++n) {
            for (int j = 0; j < v.cols(); ++j) y(i, n * v.cols() + j) = v(n, j) / value_scale;
        }
    }
    return y;
}

MatrixXd payoff_encodings(const OperatorModel& model, const SurfaceDataset& data, const std::vector<int>& surfaces) {
    MatrixXd g(model.sensors.points.size(), surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        g.col(i) = encode_payoff(PutPayoff(data.strikes[surfaces[i]]), model.sensors, model.norm.value_scale);
    }
    return g;
}

void check_grid(const OperatorModel& model, const GridSpec& grid) {
    const Normalization& n = model.norm;
    if (grid.x_min != n.x_min || grid.x_max != n.x_max || grid.maturity != n.maturity ||
        grid.n_space != n.n_space || grid.n_time != n.n_time) {
        throw ShapeError("operator: grid differs from the training grid");
    }
}

}  // namespace

double operator_forward(const OperatorModel& model, const PayoffFn& payoff, double t, double x) {
    const Normalization& n = model.norm;
    const double slack = 1e-9 * n.x_max;
    if (!(t >= -1e-12 && t <= n.maturity + 1e-12)) throw DomainError("operator_forward: t outside [0, T]");
    if (!(x >= n.x_min - slack && x <= n.x_max + slack)) throw DomainError("operator_forward: x outside grid range");
    const VectorXd b = model.branch.forward(encode_payoff(payoff, model.sensors, n.value_scale));
    VectorXd coords(2);
    coords << n.t_in(t), n.x_in(x);
    const VectorXd q = model.trunk.forward(coords);
    return n.value_scale * b.dot(q);
}

double operator_forward(const OperatorModel& model, const PutPayoff& payoff, double t, double x) {
    return operator_forward(model, PayoffFn([&payoff](double s) { return payoff(s); }), t, x);
}

double training_objective(const OperatorModel& model, const SurfaceDataset& data, const std::vector<int>& surfaces) {
    if (surfaces.empty()) return 0.0;
    check_grid(model, data.grid);
    const MatrixXd b = model.branch.forward_batch(payoff_encodings(model, data, surfaces));
    const MatrixXd q = model.trunk.forward_batch(node_features(data.grid, model.norm));
    const MatrixXd y = node_targets(data, surfaces, model.norm.value_scale);
    const MatrixXd pred = b.transpose() * q;
    return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

TrainReport train(OperatorModel& model, const SurfaceDataset& data, const TrainConfig& config,
                  const std::function<void(int, double)>& on_epoch) {
    config.validate();
    check_grid(model, data.grid);
    const std::vector<int> train_idx = data.train_indices();
    if (train_idx.empty()) throw DomainError("train: dataset has no training surfaces");

    const MatrixXd encodings = payoff_encodings(model, data, train_idx);
    const MatrixXd features = node_features(data.grid, model.norm);
    const MatrixXd targets = node_targets(data, train_idx, model.norm.value_scale);
    const int n_nodes = static_cast<int>(features.cols());
    const int n_strikes = static_cast<int>(train_idx.size());
    const int nodes_per_batch = std::clamp(config.batch_size / n_strikes, 1, n_nodes);

    TrainReport report;
    report.initial_loss = training_objective(model, data, train_idx);

    auto branch_state = AdamState<double>::for_net(model.branch);
    auto trunk_state = AdamState<double>::for_net(model.trunk);
    std::mt19937_64 rng(derive_seed(config.seed, "train.shuffle"));
    std::vector<int> order(n_nodes);
    std::iota(order.begin(), order.end(), 0);

    MatrixXd batch_x;
    MatrixXd batch_y;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        TrainConfig step_config = config;
        step_config.learning_rate = config.learning_rate_at(epoch);
        double loss_sum = 0.0;
        double count_sum = 0.0;
        for (int start = 0; start < n_nodes; start += nodes_per_batch) {
            const int nb = std::min(nodes_per_batch, n_nodes - start);
            batch_x.resize(2, nb);
            batch_y.resize(n_strikes, nb);
            for (int c = 0; c < nb; ++c) {
                batch_x.col(c) = features.col(order[start + c]);
                batch_y.col(c) = targets.col(order[start + c]);
            }
            const auto branch_cache = forward_cached(model.branch, encodings);
            const auto trunk_cache = forward_cached(model.trunk, batch_x);
            const MatrixXd& b = branch_cache.output();  // latent x strikes
            const MatrixXd& q = trunk_cache.output();   // latent x nodes
            const MatrixXd diff = b.transpose() * q - batch_y;
            const double count = static_cast<double>(diff.size());
            const double loss = diff.squaredNorm() / count;
            const MatrixXd d_pred = (2.0 / count) * diff;
            const MatrixXd d_branch = q * d_pred.transpose();
            const MatrixXd d_trunk = b * d_pred;

            const auto g_branch = backward_from_output(model.branch, branch_cache, d_branch);
            const auto g_trunk = backward_from_output(model.trunk, trunk_cache, d_trunk);
            adam_step(model.branch, g_branch, branch_state, step_config);
            adam_step(model.trunk, g_trunk, trunk_state, step_config);
            ++report.steps;
            loss_sum += loss * count;
            count_sum += count;
        }
        const double epoch_loss = loss_sum / count_sum;
        report.epoch_losses.push_back(epoch_loss);
        if (on_epoch) on_epoch(epoch, epoch_loss);
        if (!std::isfinite(epoch_loss) || epoch_loss > 10.0 * report.initial_loss) {
            throw NumericalError("training diverged at epoch " + std::to_string(epoch) + " (loss " +
                                 format_double(epoch_loss) + ", initial " + format_double(report.initial_loss) +
                                 ")");
        }
    }
    report.final_train_loss = training_objective(model, data, train_idx);
    report.final_test_loss = training_objective(model, data, data.test_indices());
    return report;
}

Prediction predict_surface_detailed(const OperatorModel& model, const PayoffFn& payoff, const GridSpec& grid) {
    check_grid(model, grid);
    const VectorXd b = model.branch.forward(encode_payoff(payoff, model.sensors, model.norm.value_scale));
    const MatrixXd q = model.trunk.forward_batch(node_features(grid, model.norm));
    const VectorXd flat = model.norm.value_scale * (q.transpose() * b);

    Prediction out{{grid, MatrixXd(grid.n_time + 1, grid.n_space), ExerciseStyle::American}, 0.0};
    long negative = 0;
    for (int n = 0; n <= grid.n_time; ++n) {
        for (int j = 0; j < grid.n_space; ++j) {
            const double v = flat[n * grid.n_space + j];
            if (v < 0.0) ++negative;
            out.surface.values(n, j) = std::max(v, 0.0);
        }
    }
    out.negative_fraction = static_cast<double>(negative) / static_cast<double>(flat.size());
    return out;
}

PriceSurface predict_surface(const OperatorModel& model, const PutPayoff& payoff, const GridSpec& grid) {
    return predict_surface_detailed(model, PayoffFn([&payoff](double x) { return payoff(x); }), grid).surface;
}

double relative_l2(const PriceSurface& a, const PriceSurface& b) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
        throw ShapeError("relative_l2: surface shapes differ");
    }
    return (a.values - b.values).norm() / b.values.norm();
}

std::vector<std::uint8_t> encode_operator(const OperatorModel& model) {
    std::vector<std::uint8_t> out{'D', 'N', 'O', 'P'};
    put_u32(out, kOperatorFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(model.latent));
    put_u32(out, static_cast<std::uint32_t>(model.sensors.points.size()));
    for (Eigen::Index i = 0; i < model.sensors.points.size(); ++i) put_f64(out, model.sensors.points[i]);
    put_f64(out, model.norm.maturity);
    put_f64(out, model.norm.x_min);
    put_f64(out, model.norm.x_max);
    put_f64(out, model.norm.value_scale);
    put_u32(out, static_cast<std::uint32_t>(model.norm.n_space));
    put_u32(out, static_cast<std::uint32_t>(model.norm.n_time));
    append_mlp_body(out, model.branch);
    append_mlp_body(out, model.trunk);
    return out;
}

OperatorModel decode_operator(const std::vector<std::uint8_t>& bytes) {
    ByteReader in(bytes);
    if (in.raw(4) != "DNOP") throw IoError("operator checkpoint: bad magic");
    if (in.u32() != kOperatorFormatVersion) throw IoError("operator checkpoint: unsupported version");
    OperatorModel model;
    model.latent = static_cast<int>(in.u32());
    const std::uint32_t n_sensors = in.u32();
    model.sensors.points.resize(n_sensors);
    for (std::uint32_t i = 0; i < n_sensors; ++i) model.sensors.points[i] = in.f64();
    model.norm.maturity = in.f64();
    model.norm.x_min = in.f64();
    model.norm.x_max = in.f64();
    model.norm.value_scale = in.f64();
    model.norm.n_space = static_cast<int>(in.u32());
    model.norm.n_time = static_cast<int>(in.u32());
    model.branch = read_mlp_body(in);
    model.trunk = read_mlp_body(in);
    if (!in.at_end()) throw IoError("operator checkpoint: trailing bytes");
    if (model.branch.input_dim() != static_cast<int>(n_sensors) || model.branch.output_dim() != model.latent ||
        model.trunk.input_dim() != 2 || model.trunk.output_dim() != model.latent) {
        throw IoError("operator checkpoint: inconsistent network shapes");
    }
    return model;
}

}  // namespace amerop
