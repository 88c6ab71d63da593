#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "amerop/commands.hpp"
#include "amerop/errors.hpp"

using namespace amerop;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "INI config file (defaults used when omitted)");
    cmd->add_option("--out", c.out_dir, "output directory (overrides [run] out_dir)");
    cmd->add_option("--seed", c.seed, "root seed (overrides [run] seed)");
}

RunConfig resolve(const Common& c) {
    RunConfig config = c.config_path.empty() ? default_config() : load_config(c.config_path);
    if (!c.out_dir.empty()) config.out_dir = c.out_dir;
    if (c.seed) config.seed = *c.seed;
    config.validate();
    return config;
}

std::string suite_list() {
    std::string s;
    for (const auto& name : verify_suites()) s += (s.empty() ? "" : ", ") + name;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"American put pricing: FD ground truth, neural operator, verification"};
    app.require_subcommand(1);
    Common common;
    double strike = 100.0;
    double spot = 100.0;
    int steps = 5000;
    std::string suite;

    auto* gen = app.add_subcommand("gen-data", "generate the FD surface dataset");
    auto* trn = app.add_subcommand("train", "train the operator on the dataset");
    auto* evl = app.add_subcommand("eval", "evaluate the trained operator against the dataset");
    auto* bnd = app.add_subcommand("boundary", "export FD and model exercise boundaries as CSV");
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    auto* bsp = app.add_subcommand("bs-price", "Black-Scholes European put and call");
    auto* crr = app.add_subcommand("crr-price", "CRR binomial American put");
    for (auto* cmd : {gen, trn, evl, bnd, ver, bsp, crr}) add_common(cmd, common);
    bnd->add_option("--strike", strike, "strike price")->required();
    ver->add_option("suite", suite, "one of: " + suite_list());
    for (auto* cmd : {bsp, crr}) {
        cmd->add_option("--strike", strike, "strike price");
        cmd->add_option("--spot", spot, "spot price");
    }
    crr->add_option("--steps", steps, "tree steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ver->parsed() && suite.empty()) {
            std::cerr << "error: verify needs a suite name; valid suites: " << suite_list() << '\n';
            return kExitUsage;
        }
        const RunConfig config = resolve(common);
        if (gen->parsed()) {
            std::cout << cmd_gen_data(config, std::cerr).dump(2) << '\n';
        } else if (trn->parsed()) {
            std::cout << cmd_train(config, std::cerr).dump(2) << '\n';
        } else if (evl->parsed()) {
            std::cout << cmd_eval(config).dump(2) << '\n';
        } else if (bnd->parsed()) {
            std::cout << cmd_boundary(config, strike);
        } else if (ver->parsed()) {
            const SuiteReport rep = cmd_verify(config, suite);
            std::cout << rep.to_json().dump(2) << '\n';
            if (!rep.pass()) {
                std::cerr << "assertion failed: " << rep.first_failure() << '\n';
                return kExitAssertion;
            }
        } else if (bsp->parsed()) {
            std::cout << cmd_bs_price(config, spot, strike).dump(2) << '\n';
        } else if (crr->parsed()) {
            std::cout << cmd_crr_price(config, spot, strike, steps).dump(2) << '\n';
        }
        return kExitOk;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
