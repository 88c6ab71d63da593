#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "amerop/fd_pricer.hpp"

namespace amerop {

/// American FD surfaces for a family of put strikes on one shared grid.
struct SurfaceDataset {
    GridSpec grid;
    MarketParams market;
    ObstacleMethod method;
    std::vector<double> strikes;
    std::vector<PriceSurface> surfaces;
    std::vector<bool> is_test;

    [[nodiscard]] std::vector<int> train_indices() const;
    [[nodiscard]] std::vector<int> test_indices() const;
    /// Index of the surface with this strike, or -1.
    [[nodiscard]] int find(double strike) const;
};

struct SplitRule {
    std::vector<double> test_strikes;
};

/// Strikes 90, 91, ..., 120.
std::vector<double> default_strikes();
/// Held-out strikes {95, 105, 113, 117}.
SplitRule default_split();

SurfaceDataset build_dataset(const std::vector<double>& strikes, const MarketParams& market, const GridSpec& grid,
                             const ObstacleMethod& method, const SplitRule& split);

inline constexpr const char* kManifestName = "manifest.json";

/// Writes manifest.json and one binary surface per strike into dir.
/// Returns the manifest text.
std::string save_dataset(const std::filesystem::path& dir, const SurfaceDataset& data);

/// Loads and hash-verifies a dataset written by save_dataset.
SurfaceDataset load_dataset(const std::filesystem::path& dir);

std::string surface_file_name(double strike);

}  // namespace amerop
