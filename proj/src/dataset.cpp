#include "amerop/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "amerop/errors.hpp"
#include "amerop/seeding.hpp"
#include "amerop/surface_io.hpp"

namespace amerop {

using nlohmann::json;

std::vector<int> SurfaceDataset::train_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(strikes.size()); ++i) {
        if (!is_test[i]) idx.push_back(i);
    }
    return idx;
}

std::vector<int> SurfaceDataset::test_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(strikes.size()); ++i) {
        if (is_test[i]) idx.push_back(i);
    }
    return idx;
}

int SurfaceDataset::find(double strike) const {
    for (int i = 0; i < static_cast<int>(strikes.size()); ++i) {
        if (strikes[i] == strike) return i;
    }
    return -1;
}

std::vector<double> default_strikes() {
    std::vector<double> k;
    for (int s = 90; s <= 120; ++s) k.push_back(s);
    return k;
}

SplitRule default_split() { return {{95.0, 105.0, 113.0, 117.0}}; }

SurfaceDataset build_dataset(const std::vector<double>& strikes, const MarketParams& market, const GridSpec& grid,
                             const ObstacleMethod& method, const SplitRule& split) {
    if (strikes.empty()) throw DomainError("build_dataset: no strikes");
    SurfaceDataset data{grid, market, method, strikes, {}, {}};
    data.surfaces.resize(strikes.size());
    for (double k : strikes) {
        data.is_test.push_back(std::find(split.test_strikes.begin(), split.test_strikes.end(), k) !=
                               split.test_strikes.end());
    }

    const int n = static_cast<int>(strikes.size());
    const int workers = std::max(1, std::min(n, static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int i = w; i < n; i += workers) {
                    try {
                        data.surfaces[i] = price_american(market, grid, PutPayoff(strikes[i]), method);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ConvergenceFailure& e) {
            throw ConvergenceFailure("strike " + format_double(strikes[i]) + ": " + e.what());
        } catch (const std::exception& e) {
            throw NumericalError("strike " + format_double(strikes[i]) + ": " + e.what());
        }
    }
    return data;
}

std::string surface_file_name(double strike) { return "surface_K" + format_double(strike) + ".bin"; }

namespace {

const char* method_name(const ObstacleMethod& m) {
    return m.variant == ObstacleMethod::Variant::Psor ? "psor" : "projected_direct";
}

}  // namespace

std::string save_dataset(const std::filesystem::path& dir, const SurfaceDataset& data) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["format"] = "amerop-dataset";
    manifest["version"] = 1;
    manifest["style"] = "american";
    manifest["grid"] = {{"x_min", data.grid.x_min},   {"x_max", data.grid.x_max},
                        {"n_space", data.grid.n_space}, {"maturity", data.grid.maturity},
                        {"n_time", data.grid.n_time}};
    manifest["market"] = {{"rate", data.market.rate}, {"volatility", data.market.volatility}};
    manifest["method"] = {{"variant", method_name(data.method)},
                          {"omega", data.method.omega},
                          {"tol", data.method.tol},
                          {"max_iter", data.method.max_iter}};
    manifest["layout"] = {{"rows", data.grid.n_time + 1},
                          {"cols", data.grid.n_space},
                          {"order", "row-major, row = time index"},
                          {"dtype", "f64le"}};
    json train = json::array();
    json test = json::array();
    json files = json::array();
    for (std::size_t i = 0; i < data.strikes.size(); ++i) {
        const double k = data.strikes[i];
        (data.is_test[i] ? test : train).push_back(k);
        const std::string name = surface_file_name(k);
        const auto bytes =
            encode_surface_binary(data.surfaces[i].values, std::string(kManifestName) + "#K=" + format_double(k));
        write_bytes(dir / name, bytes);
        files.push_back({{"strike", k},
                         {"file", name},
                         {"sha256", sha256_hex(bytes)},
                         {"split", data.is_test[i] ? "test" : "train"}});
    }
    manifest["strikes"] = data.strikes;
    manifest["split"] = {{"train", train}, {"test", test}};
    manifest["surfaces"] = files;
    const std::string text = manifest.dump(2) + "\n";
    write_text(dir / kManifestName, text);
    return text;
}

SurfaceDataset load_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / kManifestName;
    if (!std::filesystem::exists(manifest_path)) {
        throw IoError("dataset manifest not found: " + manifest_path.string());
    }
    std::ifstream is(manifest_path);
    json manifest;
    try {
        manifest = json::parse(is);
    } catch (const json::exception& e) {
        throw IoError("malformed manifest " + manifest_path.string() + ": " + e.what());
    }

    SurfaceDataset data;
    const auto& g = manifest.at("grid");
    data.grid = build_grid(g.at("x_min"), g.at("x_max"), g.at("n_space"), g.at("maturity"), g.at("n_time"));
    data.market = {manifest.at("market").at("rate"), manifest.at("market").at("volatility")};
    const auto& m = manifest.at("method");
    data.method.variant = m.at("variant") == "psor" ? ObstacleMethod::Variant::Psor
                                                    : ObstacleMethod::Variant::ProjectedDirect;
    data.method.omega = m.at("omega");
    data.method.tol = m.at("tol");
    data.method.max_iter = m.at("max_iter");

    const int rows = data.grid.n_time + 1;
    const int cols = data.grid.n_space;
    for (const auto& entry : manifest.at("surfaces")) {
        const double k = entry.at("strike");
        const auto bytes = read_bytes(dir / entry.at("file").get<std::string>());
        if (sha256_hex(bytes) != entry.at("sha256").get<std::string>()) {
            throw IoError("hash mismatch for " + entry.at("file").get<std::string>());
        }
        auto blob = decode_surface_binary(bytes, rows, cols);
        data.strikes.push_back(k);
        data.is_test.push_back(entry.at("split") == "test");
        data.surfaces.push_back({data.grid, std::move(blob.values), ExerciseStyle::American});
    }
    return data;
}

}  // namespace amerop
