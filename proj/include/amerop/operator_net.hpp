#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "amerop/dataset.hpp"
#include "amerop/fd_pricer.hpp"
#include "amerop/mlp.hpp"

namespace amerop {

/// Prices at which an input payoff is sampled for the branch network.
struct SensorSet {
    Eigen::VectorXd points;

    static SensorSet equispaced(double x_min, double x_max, int count);
};

/// Affine input/output maps plus the training lattice the model is tied to.
struct Normalization {
    double maturity = 1.0;
    double x_min = 45.0;
    double x_max = 180.0;
    double value_scale = 120.0;  ///< payoffs and prices are divided by this
    int n_space = 0;
    int n_time = 0;

    [[nodiscard]] double t_in(double t) const { return t / maturity; }
    [[nodiscard]] double x_in(double x) const { return (x - x_min) / (x_max - x_min); }
};

struct OperatorArchitecture {
    int n_sensors = 64;
    int latent = 64;
    std::vector<int> branch_hidden{128, 128};
    std::vector<int> trunk_hidden{128, 128};
};

/// Branch/trunk operator: prediction = value_scale * <branch(g_bar), trunk(t_bar, x_bar)>.
struct OperatorModel {
    Mlp branch;
    Mlp trunk;
    int latent = 0;
    SensorSet sensors;
    Normalization norm;
};

OperatorModel make_operator_model(const OperatorArchitecture& arch, const GridSpec& grid, double value_scale,
                                  std::uint64_t seed);

/// Declared class of the trunk: depth, width and sparsity from its layer
/// dims, parameters bounded by kappa, outputs by output_bound on [0,1]^2.
NetworkClassSpec trunk_class_spec(const OperatorModel& model, double kappa = 10.0, double output_bound = 1000.0);

using PayoffFn = std::function<double(double)>;

/// Payoff sampled at the sensors, divided by value_scale.
Eigen::VectorXd encode_payoff(const PayoffFn& payoff, const SensorSet& sensors, double value_scale);
Eigen::VectorXd encode_payoff(const PutPayoff& payoff, const SensorSet& sensors, double value_scale);

double operator_forward(const OperatorModel& model, const PayoffFn& payoff, double t, double x);
double operator_forward(const OperatorModel& model, const PutPayoff& payoff, double t, double x);

struct TrainReport {
    double initial_loss = 0.0;
    std::vector<double> epoch_losses;  ///< mean mini-batch loss per epoch (normalized units)
    double final_train_loss = 0.0;     ///< full objective over train tuples after training
    double final_test_loss = 0.0;      ///< same objective over test tuples (0 when none)
    long steps = 0;
};

/// Mean squared error over every (strike, t_n, x_j) tuple of the selected
/// surfaces, in normalized units. This is the function the trainer minimizes.
double training_objective(const OperatorModel& model, const SurfaceDataset& data, const std::vector<int>& surfaces);

/// Mini-batch Adam on the training split. A batch is a random block of
/// lattice nodes crossed with every training strike (about batch_size
/// tuples). Throws NumericalError if an epoch loss exceeds 10x the initial loss.
TrainReport train(OperatorModel& model, const SurfaceDataset& data, const TrainConfig& config,
                  const std::function<void(int epoch, double loss)>& on_epoch = {});

struct Prediction {
    PriceSurface surface;        ///< clipped at zero
    double negative_fraction;    ///< share of raw predictions below zero
};

Prediction predict_surface_detailed(const OperatorModel& model, const PayoffFn& payoff, const GridSpec& grid);
PriceSurface predict_surface(const OperatorModel& model, const PutPayoff& payoff, const GridSpec& grid);

/// ||a - b||_2 / ||b||_2 over all nodes.
double relative_l2(const PriceSurface& a, const PriceSurface& b);

// Checkpoint: "DNOP", u32 version 2, header section (u32 latent, u32 sensor
// count, f64 sensors, f64 maturity/x_min/x_max/value_scale, u32 n_space,
// u32 n_time), then branch and trunk in the plain network layout.
inline constexpr std::uint32_t kOperatorFormatVersion = 2;

std::vector<std::uint8_t> encode_operator(const OperatorModel& model);
OperatorModel decode_operator(const std::vector<std::uint8_t>& bytes);

}  // namespace amerop
