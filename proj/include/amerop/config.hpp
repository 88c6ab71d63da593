#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amerop/fd_pricer.hpp"
#include "amerop/mlp.hpp"
#include "amerop/operator_net.hpp"

namespace amerop {

struct VerifySettings {
    int mc_paths = 100000;
    int mc_steps = 50;
    int lipschitz_paths = 10000;
    double x0 = 100.0;
    std::vector<double> moment_orders{1.0, 2.0, 4.0};
    std::vector<double> tail_radii{20.0, 40.0, 60.0};
    std::vector<double> lipschitz_strikes{90.0, 97.5, 105.0, 112.5, 120.0};
    double lipschitz_margin = 1.05;
    int approx_paths = 10000;
    int approx_steps = 200;
};

/// Everything a run depends on. Serialized next to every artifact.
struct RunConfig {
    std::uint64_t seed = 7;
    std::filesystem::path out_dir = "run";

    MarketParams market{0.1, 0.2};
    double x_min = 45.0;
    double x_max = 180.0;
    int n_space = 300;
    double maturity = 1.0;
    int n_time = 50;

    std::vector<double> strikes = {};  ///< empty means 90..120 step 1
    std::vector<double> test_strikes{95.0, 105.0, 113.0, 117.0};
    ObstacleMethod method{};

    OperatorArchitecture arch{};
    double value_scale = 120.0;
    TrainConfig train{};

    double boundary_tol = 1e-4;
    double model_boundary_tol = 1e-4;
    double strike_min = 90.0;
    double strike_max = 120.0;

    VerifySettings verify{};

    [[nodiscard]] GridSpec grid() const { return build_grid(x_min, x_max, n_space, maturity, n_time); }
    [[nodiscard]] std::vector<double> strike_list() const;
    [[nodiscard]] std::filesystem::path dataset_dir() const { return out_dir / "dataset"; }
    [[nodiscard]] std::filesystem::path model_dir() const { return out_dir / "model"; }

    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RunConfig default_config();

/// INI-style document: [section] headers, key = value lines, lists comma
/// separated. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& config);

}  // namespace amerop
