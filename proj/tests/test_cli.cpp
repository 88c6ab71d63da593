#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("amerop_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Result run(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd = std::string("\"") + AMEROP_CLI_PATH + "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path tiny_config(const std::string& name, const std::string& strikes = "90, 95, 100, 105, 110, 120") {
    const fs::path p = work_dir() / (name + ".ini");
    std::ofstream(p) << "[run]\nseed = 11\nout = " << (work_dir() / name).string() << "\n"
                     << "[grid]\nn_space = 60\nn_time = 10\n"
                     << "[strikes]\nlist = " << strikes << "\ntest = 105\n"
                     << "[operator]\nsensors = 16\nlatent = 8\nbranch_hidden = 16\ntrunk_hidden = 16\n"
                     << "[train]\nepochs = 3\nbatch_size = 256\n";
    return p;
}

}  // namespace

TEST_CASE("verify without a suite is a usage error listing the suites") {
    const Result r = run("verify");
    CHECK(r.code == 2);
    for (const char* s : {"assumptions", "approximation", "lipschitz", "oracles"}) {
        CHECK(r.err.find(s) != std::string::npos);
    }
}

TEST_CASE("unknown suite and unknown flag are usage errors") {
    CHECK(run("verify nonsense").code == 2);
    CHECK(run("bs-price --bogus 1").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("verify oracles passes") {
    const Result r = run("verify oracles");
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["pass"].get<bool>());
}

TEST_CASE("bs-price and crr-price") {
    const Result bs = run("bs-price --spot 100 --strike 100");
    REQUIRE(bs.code == 0);
    const json b = json::parse(bs.out);
    const double parity = b["call"].get<double>() - b["put"].get<double>() - (100.0 - 100.0 * std::exp(-0.1));
    CHECK(std::abs(parity) < 1e-12);
    CHECK(b["put"].get<double>() == doctest::Approx(3.753418).epsilon(1e-6));

    const Result crr = run("crr-price --spot 100 --strike 100 --steps 500");
    REQUIRE(crr.code == 0);
    const json c = json::parse(crr.out);
    CHECK(c["american_put"].get<double>() > b["put"].get<double>());
    CHECK(c["steps"].get<int>() == 500);
}

TEST_CASE("missing dataset names the manifest path") {
    const fs::path cfg = tiny_config("empty");
    const Result r = run("train --config \"" + cfg.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find((work_dir() / "empty" / "dataset").string()) != std::string::npos);
    CHECK(r.err.find("manifest") != std::string::npos);
}

TEST_CASE("bad config values are usage errors") {
    const fs::path p = work_dir() / "bad.ini";
    std::ofstream(p) << "[grid]\nn_space = many\n";
    const Result r = run("gen-data --config \"" + p.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("grid.n_space") != std::string::npos);
}

TEST_CASE("pipeline on a tiny config") {
    const fs::path cfg = tiny_config("tiny");
    const fs::path out = work_dir() / "tiny";

    const Result gen = run("gen-data --config \"" + cfg.string() + "\"");
    REQUIRE(gen.code == 0);
    CHECK(json::parse(gen.out)["surfaces"].get<int>() == 6);
    CHECK(fs::exists(out / "dataset" / "run_config.ini"));
    const std::string manifest = slurp(out / "dataset" / "manifest.json");

    SUBCASE("rerun reproduces the dataset") {
        REQUIRE(run("gen-data --config \"" + cfg.string() + "\"").code == 0);
        CHECK(slurp(out / "dataset" / "manifest.json") == manifest);
    }

    SUBCASE("train, eval, boundary") {
        const Result trn = run("train --config \"" + cfg.string() + "\"");
        REQUIRE(trn.code == 0);
        CHECK(fs::exists(out / "model" / "operator.bin"));
        CHECK(fs::exists(out / "model" / "loss_curve.csv"));
        const json rep = json::parse(slurp(out / "model" / "train_report.json"));
        CHECK(rep["seed"].get<int>() == 11);
        CHECK(rep["epoch_losses"].size() == 3);
        CHECK(rep["test_metrics"].size() == 1);

        const Result ev = run("eval --config \"" + cfg.string() + "\"");
        REQUIRE(ev.code == 0);
        CHECK(json::parse(ev.out)["surfaces"].size() == 6);
        CHECK(fs::exists(out / "eval" / "eval_report.json"));

        const Result b120 = run("boundary --strike 120 --config \"" + cfg.string() + "\"");
        CHECK(b120.code == 0);
        CHECK(b120.out.rfind("t,b_fd,b_model,node_distance\n", 0) == 0);
        CHECK(fs::exists(out / "boundary" / "boundary_K120.csv"));

        const Result b85 = run("boundary --strike 85 --config \"" + cfg.string() + "\"");
        CHECK(b85.code == 2);
        CHECK(b85.err.find("[90, 120]") != std::string::npos);

        const Result other_seed = run("train --seed 12 --out \"" + (work_dir() / "tiny").string() +
                                      "\" --config \"" + cfg.string() + "\"");
        REQUIRE(other_seed.code == 0);
        CHECK(json::parse(other_seed.out)["checkpoint_sha256"] != rep["checkpoint_sha256"]);
    }
}

TEST_CASE("strike outside the trained range warns but proceeds") {
    const fs::path cfg = tiny_config("wide", "100, 105, 200");
    const Result r = run("gen-data --config \"" + cfg.string() + "\"");
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: strike 200") != std::string::npos);
}
