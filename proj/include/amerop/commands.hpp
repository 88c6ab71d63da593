#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "amerop/config.hpp"
#include "amerop/verify.hpp"

namespace amerop {

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitUsage = 2, kExitNumerical = 3 };

inline constexpr const char* kConfigCopyName = "run_config.ini";
inline constexpr const char* kCheckpointName = "operator.bin";
inline constexpr const char* kTrainReportName = "train_report.json";
inline constexpr const char* kLossCurveName = "loss_curve.csv";

/// Builds the FD dataset under config.dataset_dir(). Warnings go to `log`.
nlohmann::json cmd_gen_data(const RunConfig& config, std::ostream& log);

/// Trains on the persisted dataset and writes checkpoint, report and loss
/// curve under config.model_dir().
nlohmann::json cmd_train(const RunConfig& config, std::ostream& log);

/// Held-out and in-sample metrics of the trained model against the dataset.
nlohmann::json cmd_eval(const RunConfig& config);

/// FD and model boundaries for one strike; the CSV is also written to
/// out_dir/boundary/. Strikes outside [strike_min, strike_max] are rejected.
std::string cmd_boundary(const RunConfig& config, double strike);

SuiteReport cmd_verify(const RunConfig& config, const std::string& suite);

nlohmann::json cmd_bs_price(const RunConfig& config, double spot, double strike);
nlohmann::json cmd_crr_price(const RunConfig& config, double spot, double strike, int steps);

/// Writes `text` to `path`, creating parent directories.
void write_report(const std::filesystem::path& path, const std::string& text);

}  // namespace amerop
