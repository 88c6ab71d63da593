#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "amerop/config.hpp"

namespace amerop {

struct Check {
    std::string name;
    bool pass = false;
    nlohmann::json detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    nlohmann::json extra = nlohmann::json::object();

    [[nodiscard]] bool pass() const;
    /// Name of the first failing check, empty when all pass.
    [[nodiscard]] std::string first_failure() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

const std::vector<std::string>& verify_suites();

/// Put-call parity, BS monotonicity, tree convergence, FD agreement with the
/// closed form and the tree.
SuiteReport verify_oracles(const RunConfig& config);

/// Partition of unity, piecewise-constant bounds, path error scaling,
/// approximate multiplication and product-network audits.
SuiteReport verify_approximation(const RunConfig& config);

/// Moments, tails and martingale property of simulated GBM, plus the
/// Lipschitz battery.
SuiteReport verify_assumptions(const RunConfig& config);

SuiteReport verify_lipschitz(const RunConfig& config);

SuiteReport run_verify_suite(const RunConfig& config, const std::string& suite);

}  // namespace amerop
