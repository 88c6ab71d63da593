#include "amerop/boundary.hpp"

#include <cstdlib>
#include <sstream>

#include "amerop/errors.hpp"
#include "amerop/surface_io.hpp"

namespace amerop {

ExerciseBoundary extract_boundary(const PriceSurface& surface, const PutPayoff& payoff, double tol) {
    if (surface.style != ExerciseStyle::American) throw StyleError("extract_boundary: surface is European");
    if (!(tol > 0.0)) throw DomainError("extract_boundary: tol must be positive");
    const GridSpec& g = surface.grid;
    const Eigen::VectorXd x = g.prices();

    int last_below_strike = 0;
    while (last_below_strike + 1 < g.n_space && x[last_below_strike + 1] <= payoff.strike) ++last_below_strike;

    ExerciseBoundary b;
    b.tol_used = tol;
    for (int n = 0; n <= g.n_time; ++n) {
        b.times.push_back(g.time(n));
        if (n == g.n_time) {
            b.critical_prices.push_back(payoff.strike);
            b.node_index.push_back(last_below_strike);
            continue;
        }
        int j = 0;
        for (int k = last_below_strike; k >= 0; --k) {
            if (surface.values(n, k) <= payoff(x[k]) + tol) {
                j = k;
                break;
            }
        }
        b.critical_prices.push_back(x[j]);
        b.node_index.push_back(j);
    }
    return b;
}

PriceSurface clip_to_payoff(const PriceSurface& surface, const PutPayoff& payoff) {
    PriceSurface out = surface;
    const Eigen::VectorXd g = payoff(surface.grid.prices());
    for (Eigen::Index n = 0; n < out.values.rows(); ++n) {
        out.values.row(n) = out.values.row(n).cwiseMax(g.transpose());
    }
    return out;
}

int compare_boundaries(const ExerciseBoundary& a, const ExerciseBoundary& b) {
    if (a.times != b.times || a.node_index.size() != b.node_index.size()) {
        throw ShapeError("compare_boundaries: time grids differ");
    }
    int worst = 0;
    for (std::size_t n = 0; n < a.node_index.size(); ++n) {
        worst = std::max(worst, std::abs(a.node_index[n] - b.node_index[n]));
    }
    return worst;
}

std::string boundary_csv(const ExerciseBoundary& fd, const ExerciseBoundary& model) {
    compare_boundaries(fd, model);
    std::ostringstream os;
    os << "t,b_fd,b_model,node_distance\n";
    for (std::size_t n = 0; n < fd.times.size(); ++n) {
        os << format_double(fd.times[n]) << ',' << format_double(fd.critical_prices[n]) << ','
           << format_double(model.critical_prices[n]) << ',' << std::abs(fd.node_index[n] - model.node_index[n])
           << '\n';
    }
    return os.str();
}

}  // namespace amerop
