#include "amerop/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "amerop/boundary.hpp"
#include "amerop/dataset.hpp"
#include "amerop/errors.hpp"
#include "amerop/operator_net.hpp"
#include "amerop/oracles.hpp"
#include "amerop/seeding.hpp"
#include "amerop/surface_io.hpp"

namespace amerop {

using nlohmann::json;
namespace fs = std::filesystem;

void write_report(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    write_text(path, text);
}

namespace {

void check_grid_matches(const RunConfig& config, const SurfaceDataset& data) {
    const GridSpec want = config.grid();
    if (!want.same_lattice(data.grid) || data.market.rate != config.market.rate ||
        data.market.volatility != config.market.volatility) {
        throw ConfigError("dataset in " + config.dataset_dir().string() +
                          " was generated with a different grid or market; rerun gen-data");
    }
}

OperatorModel load_model(const RunConfig& config) {
    const fs::path path = config.model_dir() / kCheckpointName;
    if (!fs::exists(path)) throw IoError("model checkpoint not found: " + path.string() + " (run train first)");
    return decode_operator(read_bytes(path));
}

json surface_metrics(const RunConfig& config, const OperatorModel& model, const SurfaceDataset& data, int i) {
    const PutPayoff payoff(data.strikes[i]);
    const Prediction pred = predict_surface_detailed(
        model, PayoffFn([&payoff](double x) { return payoff(x); }), data.grid);
    const auto fd_b = extract_boundary(data.surfaces[i], payoff, config.boundary_tol);
    const auto model_b =
        extract_boundary(clip_to_payoff(pred.surface, payoff), payoff, config.model_boundary_tol);
    return {{"strike", data.strikes[i]},
            {"split", data.is_test[i] ? "test" : "train"},
            {"relative_l2", relative_l2(pred.surface, data.surfaces[i])},
            {"boundary_node_distance", compare_boundaries(fd_b, model_b)},
            {"negative_fraction", pred.negative_fraction},
            {"fd_value_t0_at_strike", surface_at(data.surfaces[i], 0.0, data.strikes[i])},
            {"model_value_t0_at_strike", surface_at(pred.surface, 0.0, data.strikes[i])}};
}

}  // namespace

json cmd_gen_data(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto strikes = config.strike_list();
    for (double k : strikes) {
        if (k < config.strike_min || k > config.strike_max) {
            log << "warning: strike " << format_double(k) << " is outside the trained range ["
                << format_double(config.strike_min) << ", " << format_double(config.strike_max) << "]\n";
        }
    }
    const SurfaceDataset data =
        build_dataset(strikes, config.market, config.grid(), config.method, SplitRule{config.test_strikes});
    const fs::path dir = config.dataset_dir();
    save_dataset(dir, data);
    write_report(dir / kConfigCopyName, to_ini(config));
    return {{"dataset_dir", dir.string()},
            {"surfaces", data.strikes.size()},
            {"train", data.train_indices().size()},
            {"test", data.test_indices().size()}};
}

json cmd_train(const RunConfig& config, std::ostream& log) {
    config.validate();
    const SurfaceDataset data = load_dataset(config.dataset_dir());
    check_grid_matches(config, data);

    OperatorModel model = make_operator_model(config.arch, data.grid, config.value_scale, config.seed);
    TrainConfig tc = config.train;
    tc.seed = config.seed;
    const int every = std::max(1, tc.epochs / 10);
    const TrainReport rep = train(model, data, tc, [&](int epoch, double loss) {
        if (epoch % every == 0 || epoch + 1 == tc.epochs) {
            log << "epoch " << epoch << " loss " << format_double(loss) << '\n';
        }
    });

    const fs::path dir = config.model_dir();
    const auto bytes = encode_operator(model);
    fs::create_directories(dir);
    write_bytes(dir / kCheckpointName, bytes);

    std::string curve = "epoch,loss\n";
    for (std::size_t e = 0; e < rep.epoch_losses.size(); ++e) {
        curve += std::to_string(e) + ',' + format_double(rep.epoch_losses[e]) + '\n';
    }
    write_report(dir / kLossCurveName, curve);

    json test = json::array();
    for (int i : data.test_indices()) test.push_back(surface_metrics(config, model, data, i));
    json report{{"seed", config.seed},
                {"epochs", tc.epochs},
                {"steps", rep.steps},
                {"initial_loss", rep.initial_loss},
                {"final_train_loss", rep.final_train_loss},
                {"final_test_loss", rep.final_test_loss},
                {"epoch_losses", rep.epoch_losses},
                {"checkpoint_sha256", sha256_hex(bytes)},
                {"test_metrics", test}};
    write_report(dir / kTrainReportName, report.dump(2) + "\n");
    write_report(dir / kConfigCopyName, to_ini(config));
    report.erase("epoch_losses");
    return report;
}

json cmd_eval(const RunConfig& config) {
    config.validate();
    const SurfaceDataset data = load_dataset(config.dataset_dir());
    check_grid_matches(config, data);
    const OperatorModel model = load_model(config);

    json rows = json::array();
    bool l2_ok = true;
    bool boundary_ok = true;
    for (std::size_t i = 0; i < data.strikes.size(); ++i) {
        json m = surface_metrics(config, model, data, static_cast<int>(i));
        if (data.is_test[i]) {
            l2_ok &= m["relative_l2"].get<double>() < 0.02;
            boundary_ok &= m["boundary_node_distance"].get<int>() <= 2;
        }
        rows.push_back(std::move(m));
    }
    json report{{"surfaces", rows},
                {"test_relative_l2_below_2pct", l2_ok},
                {"test_boundary_within_2_nodes", boundary_ok}};
    write_report(config.out_dir / "eval" / "eval_report.json", report.dump(2) + "\n");
    return report;
}

std::string cmd_boundary(const RunConfig& config, double strike) {
    config.validate();
    if (!(strike >= config.strike_min && strike <= config.strike_max)) {
        throw DomainError("strike " + format_double(strike) + " is outside the supported range [" +
                          format_double(config.strike_min) + ", " + format_double(config.strike_max) + "]");
    }
    const OperatorModel model = load_model(config);
    const GridSpec grid = config.grid();
    const PutPayoff payoff(strike);

    PriceSurface fd;
    bool from_dataset = false;
    if (fs::exists(config.dataset_dir() / kManifestName)) {
        const SurfaceDataset data = load_dataset(config.dataset_dir());
        const int i = data.find(strike);
        if (i >= 0 && data.grid.same_lattice(grid)) {
            fd = data.surfaces[i];
            from_dataset = true;
        }
    }
    if (!from_dataset) fd = price_american(config.market, grid, payoff, config.method);

    const auto fd_b = extract_boundary(fd, payoff, config.boundary_tol);
    const auto model_b =
        extract_boundary(clip_to_payoff(predict_surface(model, payoff, grid), payoff), payoff,
                         config.model_boundary_tol);
    const std::string csv = boundary_csv(fd_b, model_b);
    write_report(config.out_dir / "boundary" / ("boundary_K" + format_double(strike) + ".csv"), csv);
    return csv;
}

SuiteReport cmd_verify(const RunConfig& config, const std::string& suite) {
    config.validate();
    return run_verify_suite(config, suite);
}

json cmd_bs_price(const RunConfig& config, double spot, double strike) {
    config.validate();
    const BsQuote q{spot, strike, config.market.rate, config.market.volatility, config.maturity};
    return {{"spot", spot}, {"strike", strike}, {"rate", q.rate}, {"volatility", q.volatility},
            {"maturity", q.tau}, {"put", bs_put(q)}, {"call", bs_call(q)}};
}

json cmd_crr_price(const RunConfig& config, double spot, double strike, int steps) {
    config.validate();
    return {{"spot", spot},
            {"strike", strike},
            {"steps", steps},
            {"rate", config.market.rate},
            {"volatility", config.market.volatility},
            {"maturity", config.maturity},
            {"american_put", crr_american_put(spot, strike, config.market, config.maturity, steps)}};
}

}  // namespace amerop
