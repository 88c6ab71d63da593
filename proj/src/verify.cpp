#include "amerop/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "amerop/oracles.hpp"
#include "amerop/pou_approx.hpp"
#include "amerop/sde_sim.hpp"
#include "amerop/seeding.hpp"

namespace amerop {

using nlohmann::json;

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SuiteReport::first_failure() const {
    for (const auto& c : checks) {
        if (!c.pass) return c.name;
    }
    return {};
}

json SuiteReport::to_json() const {
    json j;
    j["suite"] = suite;
    j["pass"] = pass();
    j["checks"] = json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"assumptions", "approximation", "lipschitz", "oracles"};
    return names;
}

namespace {

int nearest_node(const GridSpec& g, double x) {
    int best = 0;
    for (int j = 1; j < g.n_space; ++j) {
        if (std::abs(g.price(j) - x) < std::abs(g.price(best) - x)) best = j;
    }
    return best;
}

double european_atm_error(const MarketParams& m, const RunConfig& c, int n_time, double strike) {
    const GridSpec g = build_grid(c.x_min, c.x_max, c.n_space, c.maturity, n_time);
    const auto s = price_european(m, g, PutPayoff(strike));
    const int j = nearest_node(g, strike);
    return std::abs(s.values(0, j) - bs_put({g.price(j), strike, m.rate, m.volatility, c.maturity}));
}

}  // namespace

SuiteReport verify_oracles(const RunConfig& c) {
    SuiteReport rep{"oracles", {}, json::object()};
    const MarketParams& m = c.market;
    const double tau = c.maturity;

    double parity_err = 0.0;
    bool spot_mono = true;
    bool strike_mono = true;
    bool vol_mono = true;
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            const double s = 60.0 + 10.0 * a;
            const double k = 80.0 + 5.0 * b;
            const BsQuote q{s, k, m.rate, m.volatility, tau};
            parity_err = std::max(parity_err, std::abs(bs_call(q) - bs_put(q) - (s - k * std::exp(-m.rate * tau))));
            spot_mono &= bs_put({s + 1.0, k, m.rate, m.volatility, tau}) < bs_put(q);
            strike_mono &= bs_put({s, k + 1.0, m.rate, m.volatility, tau}) > bs_put(q);
            vol_mono &= bs_put({s, k, m.rate, m.volatility + 0.01, tau}) > bs_put(q);
        }
    }
    rep.checks.push_back({"put_call_parity", parity_err < 1e-12, {{"max_error", parity_err}, {"tol", 1e-12}}});
    rep.checks.push_back({"bs_monotonicity", spot_mono && strike_mono && vol_mono,
                          {{"decreasing_in_spot", spot_mono},
                           {"increasing_in_strike", strike_mono},
                           {"increasing_in_volatility", vol_mono}}});

    std::vector<double> gaps;
    for (int n : {250, 500, 1000, 2500}) {
        gaps.push_back(std::abs(crr_american_put(100, 100, m, tau, 2 * n) - crr_american_put(100, 100, m, tau, n)));
    }
    bool shrinking = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) shrinking &= gaps[i] < gaps[i - 1];
    rep.checks.push_back({"tree_convergence", shrinking, {{"steps", {250, 500, 1000, 2500}}, {"gaps", gaps}}});

    bool premium = true;
    for (double s : {80.0, 90.0, 100.0, 110.0, 120.0}) {
        premium &= crr_american_put(s, 100, m, tau, 1000) >= bs_put({s, 100, m.rate, m.volatility, tau});
    }
    rep.checks.push_back({"american_premium_nonnegative", premium, json::object()});

    const GridSpec grid = c.grid();
    const auto euro = price_european(m, grid, PutPayoff(100));
    double max_err = 0.0;
    for (int j = 0; j < grid.n_space; ++j) {
        const double x = grid.price(j);
        if (x < 70.0 || x > 160.0) continue;
        max_err = std::max(max_err, std::abs(euro.values(0, j) - bs_put({x, 100, m.rate, m.volatility, tau})));
    }
    rep.checks.push_back({"fd_european_vs_closed_form", max_err < 0.15, {{"max_error", max_err}, {"tol", 0.15}}});

    const double e1 = european_atm_error(m, c, c.n_time, 100);
    const double e2 = european_atm_error(m, c, 2 * c.n_time, 100);
    const double ratio = e1 / e2;
    rep.checks.push_back({"fd_time_refinement", ratio >= 1.6 && ratio <= 2.4,
                          {{"error_nt", e1}, {"error_2nt", e2}, {"ratio", ratio}, {"range", {1.6, 2.4}}}});

    const auto amer = price_american(m, grid, PutPayoff(100), c.method);
    json rows = json::array();
    bool close = true;
    for (double s : {90.0, 100.0, 110.0}) {
        const double fd = surface_at(amer, 0.0, s);
        const double tree = crr_american_put(s, 100, m, tau, 5000);
        close &= std::abs(fd - tree) < 0.10;
        rows.push_back({{"spot", s}, {"fd", fd}, {"crr_5000", tree}, {"diff", fd - tree}});
    }
    rep.checks.push_back({"fd_american_vs_crr", close, {{"points", rows}, {"tol", 0.10}}});
    return rep;
}

SuiteReport verify_approximation(const RunConfig& c) {
    SuiteReport rep{"approximation", {}, json::object()};
    json table = json::array();
    std::mt19937_64 rng(derive_seed(c.seed, "verify.pou"));

    struct Config {
        int d;
        int n;
        double r;
    };
    for (const Config& cfg : {Config{1, 10, 1.0}, Config{1, 33, 67.5}, Config{2, 8, 1.0}, Config{2, 15, 3.0}}) {
        const CenterGrid grid = make_center_grid(cfg.r, cfg.n, cfg.d);
        std::uniform_real_distribution<double> unif(-cfg.r, cfg.r);
        double worst = 0.0;
        for (int s = 0; s < 1000; ++s) {
            Eigen::VectorXd x(cfg.d);
            for (int j = 0; j < cfg.d; ++j) x[j] = unif(rng);
            double sum = 0.0;
            for (const auto& ck : grid.centers) sum += phi_center(x, ck, grid);
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        rep.checks.push_back({"partition_of_unity_d" + std::to_string(cfg.d) + "_N" + std::to_string(cfg.n),
                              worst <= 1e-12,
                              {{"d", cfg.d}, {"N", cfg.n}, {"r", cfg.r}, {"max_deviation", worst}}});
    }

    // Piecewise-constant sup error on dense audit grids.
    struct Target {
        std::string name;
        ScalarField g;
        double lip;
        int d;
        double r;
    };
    const std::vector<Target> targets = {
        {"constant", [](const Eigen::VectorXd&) { return 7.0; }, 0.0, 1, 67.5},
        {"linear", [](const Eigen::VectorXd& x) { return 0.5 * x[0] + 1.0; }, 0.5, 1, 67.5},
        {"put_K100", [](const Eigen::VectorXd& x) { return std::max(100.0 - (x[0] + 112.5), 0.0); }, 1.0, 1, 67.5},
        {"constant", [](const Eigen::VectorXd&) { return 7.0; }, 0.0, 2, 1.0},
        {"linear", [](const Eigen::VectorXd& x) { return 3.0 * x[0] - 4.0 * x[1]; }, 5.0, 2, 1.0},
        {"basket_put", [](const Eigen::VectorXd& x) { return std::max(0.5 - x[0] - x[1], 0.0); }, std::sqrt(2.0), 2, 1.0},
    };
    for (const auto& t : targets) {
        for (int n : {9, 17, 33}) {
            const CenterGrid grid = make_center_grid(t.r, n, t.d);
            const ScalarField approx = piecewise_const_approx(t.g, grid);
            const int per_dim = t.d == 1 ? 10000 : 200;
            double sup = 0.0;
            Eigen::VectorXd x(t.d);
            const long total = t.d == 1 ? per_dim : static_cast<long>(per_dim) * per_dim;
            for (long k = 0; k < total; ++k) {
                long rest = k;
                for (int j = 0; j < t.d; ++j) {
                    x[j] = -t.r + 2.0 * t.r * static_cast<double>(rest % per_dim) / (per_dim - 1);
                    rest /= per_dim;
                }
                sup = std::max(sup, std::abs(t.g(x) - approx(x)));
            }
            const double bound = 2.0 * t.r * t.lip * std::sqrt(static_cast<double>(t.d)) / (n - 1);
            const bool ok = sup <= bound + 1e-12;
            rep.checks.push_back({"piecewise_bound_" + t.name + "_d" + std::to_string(t.d) + "_N" + std::to_string(n), ok,
                                  {{"sup_error", sup}, {"bound", bound}}});
            table.push_back({{"check", "piecewise_" + t.name}, {"d", t.d}, {"N", n}, {"r", t.r}, {"m", nullptr},
                             {"interior", sup}, {"tail", 0.0}, {"bound", bound}, {"pass", ok}});
        }
    }

    // Path-space error: put payoff along GBM paths recentered at x0.
    const PutPayoff put(100.0);
    const auto g_put = [&put](double x) { return put(x); };
    const PathBatch batch = simulate_gbm(c.verify.x0, c.market, c.maturity, c.verify.approx_steps,
                                        c.verify.approx_paths, derive_seed(c.seed, "verify.path_approx"));
    const double path_r = 60.0;
    const int n_coarse = 16;
    const auto coarse = path_approx_error(g_put, make_center_grid(path_r, n_coarse, 1), batch);
    const auto fine = path_approx_error(g_put, make_center_grid(path_r, 2 * n_coarse, 1), batch);
    const double ratio = coarse.interior / fine.interior;
    for (const auto& [n, e] : {std::pair{n_coarse, coarse}, std::pair{2 * n_coarse, fine}}) {
        const double bound = std::pow(2.0 * path_r * 1.0, 2) / std::pow(n - 1.0, 2);
        table.push_back({{"check", "path_error"}, {"d", 1}, {"N", n}, {"r", path_r}, {"m", nullptr},
                         {"interior", e.interior}, {"tail", e.tail}, {"bound", bound},
                         {"pass", e.interior <= bound}});
        rep.checks.push_back({"path_interior_bound_N" + std::to_string(n), e.interior <= bound,
                              {{"interior", e.interior}, {"bound", bound}}});
    }
    rep.checks.push_back({"path_interior_doubling_ratio", ratio >= 3.0 && ratio <= 5.0,
                          {{"N", {n_coarse, 2 * n_coarse}}, {"ratio", ratio}, {"range", {3.0, 5.0}}}});

    const double small_r = 20.0;
    const auto tail_small = path_approx_error(g_put, make_center_grid(small_r, 9, 1), batch);
    const auto tail_large = path_approx_error(g_put, make_center_grid(2 * small_r, 17, 1), batch);
    rep.checks.push_back({"path_tail_decreases_with_radius", tail_large.tail < tail_small.tail,
                          {{"r", {small_r, 2 * small_r}}, {"tail", {tail_small.tail, tail_large.tail}}}});
    table.push_back({{"check", "path_tail"}, {"d", 1}, {"N", 9}, {"r", small_r}, {"m", nullptr},
                     {"interior", tail_small.interior}, {"tail", tail_small.tail}, {"bound", nullptr},
                     {"pass", true}});
    table.push_back({{"check", "path_tail"}, {"d", 1}, {"N", 17}, {"r", 2 * small_r}, {"m", nullptr},
                     {"interior", tail_large.interior}, {"tail", tail_large.tail}, {"bound", nullptr},
                     {"pass", tail_large.tail < tail_small.tail}});

    // Sawtooth squaring: error bound and 4x decay per level.
    double prev = 0.0;
    bool decay_ok = true;
    json sq_rows = json::array();
    for (int level = 1; level <= 8; ++level) {
        double sup = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const double x = k / 9999.0;
            sup = std::max(sup, std::abs(approx_square(x, level) - x * x));
        }
        if (level > 1) decay_ok &= (prev / sup >= 3.5 && prev / sup <= 4.5);
        sq_rows.push_back({{"m", level}, {"sup_error", sup}, {"bound", approx_square_accuracy(level)}});
        decay_ok &= sup <= approx_square_accuracy(level);
        prev = sup;
    }
    rep.checks.push_back({"approx_square_bound_and_decay", decay_ok, {{"levels", sq_rows}}});

    for (int level : {6, 8, 10}) {
        const Mlp net = mul_network(level, 1.0);
        double sup = 0.0;
        double net_gap = 0.0;
        double eps = 0.0;
        for (int a = 0; a < 200; ++a) {
            for (int b = 0; b < 200; ++b) {
                const double x = -1.0 + 2.0 * a / 199.0;
                const double y = -1.0 + 2.0 * b / 199.0;
                const auto r = approx_mul(x, y, level, 1.0);
                eps = r.declared_eps;
                sup = std::max(sup, std::abs(r.value - x * y));
                Eigen::VectorXd in(2);
                in << x, y;
                net_gap = std::max(net_gap, std::abs(net.forward(in)[0] - r.value));
            }
        }
        const bool ok = sup <= eps && net_gap <= 1e-12;
        rep.checks.push_back({"approx_mul_m" + std::to_string(level), ok,
                              {{"M", 1.0}, {"sup_error", sup}, {"declared_eps", eps}, {"network_gap", net_gap}}});
        table.push_back({{"check", "approx_mul"}, {"d", 2}, {"N", nullptr}, {"r", 1.0}, {"m", level},
                         {"interior", sup}, {"tail", 0.0}, {"bound", eps}, {"pass", ok}});
    }

    for (int d : {1, 2, 3}) {
        const int level = 8;
        const CenterGrid grid = make_center_grid(1.0, 5, d);
        const Eigen::VectorXd center = grid.centers[grid.centers.size() / 2];
        const BumpNetwork bump = product_bump_network(center, grid, level);
        const int per_dim = d == 1 ? 2001 : (d == 2 ? 121 : 31);
        long total = 1;
        for (int j = 0; j < d; ++j) total *= per_dim;
        Eigen::MatrixXd sample(d, total);
        for (long k = 0; k < total; ++k) {
            long rest = k;
            for (int j = 0; j < d; ++j) {
                sample(j, k) = -1.0 + 2.0 * static_cast<double>(rest % per_dim) / (per_dim - 1);
                rest /= per_dim;
            }
        }
        const Eigen::MatrixXd out = bump.net.forward_batch(sample);
        double sup = 0.0;
        for (long k = 0; k < total; ++k) {
            sup = std::max(sup, std::abs(out(0, k) - phi_center(sample.col(k), center, grid)));
        }
        const ClassAudit audit = audit_class(bump.net, bump.spec, sample);
        const double bound = d * bump.mul_accuracy + 1e-12;
        const bool ok = audit.pass() && sup <= bound;
        rep.checks.push_back({"product_network_d" + std::to_string(d), ok,
                              {{"sup_error", sup},
                               {"bound", bound},
                               {"depth", audit.depth},
                               {"width", audit.max_width},
                               {"nonzeros", audit.nonzero_params},
                               {"max_abs_param", audit.max_abs_param},
                               {"max_abs_output", audit.max_abs_output},
                               {"audit_pass", audit.pass()}}});
        table.push_back({{"check", "product_network"}, {"d", d}, {"N", 5}, {"r", 1.0}, {"m", level},
                         {"interior", sup}, {"tail", 0.0}, {"bound", bound}, {"pass", ok}});
    }

    // Covering-grid counts M(delta) against C delta^-d.
    json cover = json::array();
    bool cover_ok = true;
    for (int d : {1, 2}) {
        for (double delta : {0.5, 0.25, 0.125, 0.0625}) {
            const auto grid = covering_grid(1.0, delta, d);
            const double scaled = static_cast<double>(grid.centers.size()) * std::pow(delta, d);
            cover_ok &= grid.spacing() <= delta && scaled <= std::pow(3.0, d);
            cover.push_back({{"d", d}, {"delta", delta}, {"count", grid.centers.size()}, {"count_times_delta_d", scaled}});
        }
    }
    rep.checks.push_back({"covering_count", cover_ok, {{"rows", cover}}});
    rep.extra["table"] = table;
    return rep;
}

namespace {

void add_lipschitz_battery(const RunConfig& c, SuiteReport& rep) {
    const GridSpec grid = c.grid();
    const PathBatch batch = simulate_gbm(c.verify.x0, c.market, c.maturity, grid.n_time, c.verify.lipschitz_paths,
                                        derive_seed(c.seed, "verify.lipschitz"));
    const auto& ks = c.verify.lipschitz_strikes;
    std::vector<PriceSurface> surfaces;
    for (double k : ks) surfaces.push_back(price_european(c.market, grid, PutPayoff(k)));

    json pairs = json::array();
    bool all_ok = true;
    double worst_exit = 0.0;
    for (std::size_t a = 0; a < ks.size(); ++a) {
        for (std::size_t b = 0; b < ks.size(); ++b) {
            const auto pair = lipschitz_gap_check(surfaces[a], surfaces[b], PutPayoff(ks[a]), PutPayoff(ks[b]),
                                                  c.market.rate, batch);
            const bool ok = pair.lhs <= pair.rhs * c.verify.lipschitz_margin;
            all_ok &= ok;
            worst_exit = std::max(worst_exit, pair.exit_fraction);
            pairs.push_back({{"k1", ks[a]}, {"k2", ks[b]}, {"lhs", pair.lhs}, {"rhs", pair.rhs}, {"pass", ok}});
        }
    }
    rep.checks.push_back({"lipschitz_battery", all_ok,
                          {{"margin", c.verify.lipschitz_margin}, {"paths", c.verify.lipschitz_paths}}});
    rep.checks.push_back({"grid_exit_fraction", worst_exit < 0.01, {{"exit_fraction", worst_exit}, {"limit", 0.01}}});
    rep.extra["lipschitz_pairs"] = pairs;
}

}  // namespace

SuiteReport verify_assumptions(const RunConfig& c) {
    SuiteReport rep{"assumptions", {}, json::object()};
    const PathBatch batch = simulate_gbm(c.verify.x0, c.market, c.maturity, c.verify.mc_steps, c.verify.mc_paths,
                                        derive_seed(c.seed, "verify.gbm"));

    const double disc = std::exp(-c.market.rate * c.maturity);
    const Eigen::VectorXd terminal = batch.values.col(batch.n_steps);
    const double mean = terminal.mean();
    const double sd = std::sqrt((terminal.array() - mean).square().sum() / (batch.n_paths - 1));
    const double se = disc * sd / std::sqrt(static_cast<double>(batch.n_paths));
    const double gap = disc * mean - c.verify.x0;
    rep.checks.push_back({"martingale", std::abs(gap) <= 4.0 * se,
                          {{"discounted_mean", disc * mean}, {"x0", c.verify.x0}, {"std_error", se}}});

    json moments = json::array();
    bool moments_ok = true;
    for (double p : c.verify.moment_orders) {
        const double v = empirical_sup_moment(batch, p);
        moments_ok &= std::isfinite(v) && v > 0.0;
        moments.push_back({{"p", p}, {"estimate", v}});
    }
    const double m1 = empirical_sup_moment(batch, 1.0);
    const double envelope = 3.0 * c.verify.x0 * std::exp(c.market.rate * c.maturity) *
                            std::exp(c.market.volatility * c.market.volatility * c.maturity);
    const double m2 = empirical_sup_moment(batch, 2.0);
    const double m4 = empirical_sup_moment(batch, 4.0);
    rep.checks.push_back({"sup_moments_finite", moments_ok, {{"moments", moments}}});
    rep.checks.push_back({"sup_moment_envelope_p1", m1 < envelope, {{"estimate", m1}, {"envelope", envelope}}});
    rep.checks.push_back({"sup_moment_jensen", m4 >= m2 * m2 * (1.0 - 1e-12), {{"p2", m2}, {"p4", m4}}});

    json tail = json::array();
    std::vector<double> probs;
    for (double r : c.verify.tail_radii) {
        probs.push_back(empirical_tail_prob(batch, r));
        tail.push_back({{"radius", r}, {"probability", probs.back()}});
    }
    bool strictly = true;
    for (std::size_t i = 1; i < probs.size(); ++i) strictly &= probs[i] < probs[i - 1];
    const TailFit fit = fit_tail_exponent(c.verify.tail_radii, probs);
    rep.checks.push_back({"tail_strictly_decreasing", strictly, {{"table", tail}}});
    rep.checks.push_back({"tail_fit_negative_slope", fit.points_used >= 2 && fit.slope < 0.0,
                          {{"slope_per_radius_sq", fit.slope}, {"intercept", fit.intercept}, {"points", fit.points_used}}});
    const double far = empirical_tail_prob(batch, 10.0 * c.verify.x0);
    rep.checks.push_back({"tail_far_radius_empty", far == 0.0, {{"radius", 10.0 * c.verify.x0}, {"probability", far}}});
    rep.extra["tail_table"] = tail;
    rep.extra["moments"] = moments;

    add_lipschitz_battery(c, rep);
    return rep;
}

SuiteReport verify_lipschitz(const RunConfig& c) {
    SuiteReport rep{"lipschitz", {}, json::object()};
    add_lipschitz_battery(c, rep);
    return rep;
}

SuiteReport run_verify_suite(const RunConfig& config, const std::string& suite) {
    if (suite == "assumptions") return verify_assumptions(config);
    if (suite == "approximation") return verify_approximation(config);
    if (suite == "lipschitz") return verify_lipschitz(config);
    if (suite == "oracles") return verify_oracles(config);
    std::string names;
    for (const auto& s : verify_suites()) names += (names.empty() ? "" : ", ") + s;
    throw ConfigError("unknown verify suite '" + suite + "'; valid suites: " + names);
}

}  // namespace amerop
