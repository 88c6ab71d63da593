#include "amerop/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "amerop/surface_io.hpp"

namespace amerop {

namespace pt = boost::property_tree;

std::vector<double> RunConfig::strike_list() const {
    if (!strikes.empty()) return strikes;
    std::vector<double> k;
    for (int s = 90; s <= 120; ++s) k.push_back(s);
    return k;
}

void RunConfig::validate() const {
    try {
        market.validate();
        (void)grid();
        method.validate();
        train.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (arch.n_sensors < 2 || arch.latent < 1) throw ConfigError("operator: sensors >= 2 and latent >= 1 required");
    if (!(value_scale > 0.0)) throw ConfigError("operator: value_scale must be positive");
    if (!(boundary_tol > 0.0) || !(model_boundary_tol > 0.0)) throw ConfigError("boundary: tolerances must be positive");
    for (double k : strike_list()) {
        if (!(k > 0.0)) throw ConfigError("strikes must be positive");
    }
    if (verify.mc_paths < 2 || verify.mc_steps < 1 || verify.lipschitz_paths < 2) {
        throw ConfigError("verify: sample sizes too small");
    }
}

RunConfig default_config() { return RunConfig{}; }

namespace {

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError(key + ": not a number: '" + raw + "'");
    return v;
}

long long to_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError(key + ": not an integer: '" + raw + "'");
    return v;
}

template <typename T, typename Conv>
std::vector<T> to_list(const std::string& key, const std::string& raw, Conv conv) {
    std::vector<T> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) out.push_back(static_cast<T>(conv(key, item)));
    }
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define AMEROP_DOUBLE(sec, name, member)                                                        \
    Field{sec, name, [](const RunConfig& c) { return format_double(c.member); },                \
          [](RunConfig& c, const std::string& v) { c.member = to_double(sec "." name, v); }}
#define AMEROP_INT(sec, name, member)                                                             \
    Field{sec, name, [](const RunConfig& c) { return std::to_string(c.member); },                 \
          [](RunConfig& c, const std::string& v) {                                                \
              c.member = static_cast<decltype(c.member)>(to_int(sec "." name, v));                 \
          }}
#define AMEROP_DLIST(sec, name, member)                                                         \
    Field{sec, name, [](const RunConfig& c) { return join(c.member); },                         \
          [](RunConfig& c, const std::string& v) { c.member = to_list<double>(sec "." name, v, to_double); }}
#define AMEROP_ILIST(sec, name, member)                                                         \
    Field{sec, name, [](const RunConfig& c) { return join(c.member); },                         \
          [](RunConfig& c, const std::string& v) { c.member = to_list<int>(sec "." name, v, to_int); }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        AMEROP_INT("run", "seed", seed),
        Field{"run", "out", [](const RunConfig& c) { return c.out_dir.string(); },
              [](RunConfig& c, const std::string& v) { c.out_dir = trim(v); }},
        AMEROP_DOUBLE("market", "rate", market.rate),
        AMEROP_DOUBLE("market", "volatility", market.volatility),
        AMEROP_DOUBLE("grid", "x_min", x_min),
        AMEROP_DOUBLE("grid", "x_max", x_max),
        AMEROP_INT("grid", "n_space", n_space),
        AMEROP_DOUBLE("grid", "maturity", maturity),
        AMEROP_INT("grid", "n_time", n_time),
        AMEROP_DLIST("strikes", "list", strikes),
        AMEROP_DLIST("strikes", "test", test_strikes),
        AMEROP_DOUBLE("strikes", "range_min", strike_min),
        AMEROP_DOUBLE("strikes", "range_max", strike_max),
        Field{"obstacle", "method",
              [](const RunConfig& c) {
                  return std::string(c.method.variant == ObstacleMethod::Variant::Psor ? "psor" : "projected_direct");
              },
              [](RunConfig& c, const std::string& v) {
                  const auto s = trim(v);
                  if (s == "psor") {
                      c.method.variant = ObstacleMethod::Variant::Psor;
                  } else if (s == "projected_direct") {
                      c.method.variant = ObstacleMethod::Variant::ProjectedDirect;
                  } else {
                      throw ConfigError("obstacle.method: expected psor or projected_direct, got '" + s + "'");
                  }
              }},
        AMEROP_DOUBLE("obstacle", "omega", method.omega),
        AMEROP_DOUBLE("obstacle", "tol", method.tol),
        AMEROP_INT("obstacle", "max_iter", method.max_iter),
        AMEROP_INT("operator", "sensors", arch.n_sensors),
        AMEROP_INT("operator", "latent", arch.latent),
        AMEROP_ILIST("operator", "branch_hidden", arch.branch_hidden),
        AMEROP_ILIST("operator", "trunk_hidden", arch.trunk_hidden),
        AMEROP_DOUBLE("operator", "value_scale", value_scale),
        AMEROP_DOUBLE("train", "learning_rate", train.learning_rate),
        AMEROP_DOUBLE("train", "final_learning_rate", train.final_learning_rate),
        AMEROP_INT("train", "epochs", train.epochs),
        AMEROP_INT("train", "batch_size", train.batch_size),
        AMEROP_DOUBLE("train", "beta1", train.beta1),
        AMEROP_DOUBLE("train", "beta2", train.beta2),
        AMEROP_DOUBLE("train", "eps", train.eps_stability),
        AMEROP_DOUBLE("boundary", "tol", boundary_tol),
        AMEROP_DOUBLE("boundary", "model_tol", model_boundary_tol),
        AMEROP_INT("verify", "mc_paths", verify.mc_paths),
        AMEROP_INT("verify", "mc_steps", verify.mc_steps),
        AMEROP_INT("verify", "lipschitz_paths", verify.lipschitz_paths),
        AMEROP_DOUBLE("verify", "x0", verify.x0),
        AMEROP_DLIST("verify", "moment_orders", verify.moment_orders),
        AMEROP_DLIST("verify", "tail_radii", verify.tail_radii),
        AMEROP_DLIST("verify", "lipschitz_strikes", verify.lipschitz_strikes),
        AMEROP_DOUBLE("verify", "lipschitz_margin", verify.lipschitz_margin),
        AMEROP_INT("verify", "approx_paths", verify.approx_paths),
        AMEROP_INT("verify", "approx_steps", verify.approx_steps),
    };
    return table;
}

#undef AMEROP_DOUBLE
#undef AMEROP_INT
#undef AMEROP_DLIST
#undef AMEROP_ILIST

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    std::map<std::string, const Field*> index;
    for (const auto& f : fields()) index[f.section + "." + f.key] = &f;

    RunConfig config = default_config();
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            const auto it = index.find(section + "." + key);
            if (it == index.end()) throw ConfigError("config: unknown key " + section + "." + key);
            it->second->set(config, value.get_value<std::string>());
        }
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string to_ini(const RunConfig& config) {
    std::ostringstream os;
    std::string current;
    for (const auto& f : fields()) {
        if (f.section != current) {
            if (!current.empty()) os << '\n';
            os << '[' << f.section << "]\n";
            current = f.section;
        }
        os << f.key << " = " << f.get(config) << '\n';
    }
    return os.str();
}

}  // namespace amerop
