#pragma once

#include <string>
#include <vector>

#include "amerop/fd_pricer.hpp"

namespace amerop {

/// Critical price b(t_n) per time row, with its lattice index.
struct ExerciseBoundary {
    std::vector<double> times;
    std::vector<double> critical_prices;
    std::vector<int> node_index;
    double tol_used = 0.0;
};

inline constexpr double kDefaultBoundaryTol = 1e-4;

/// b(t_n) is the largest node x_j <= K with u(t_n, x_j) <= g(x_j) + tol,
/// x_min if none qualifies. b(T) is the strike.
ExerciseBoundary extract_boundary(const PriceSurface& surface, const PutPayoff& payoff,
                                  double tol = kDefaultBoundaryTol);

/// u := max(u, g) nodewise.
PriceSurface clip_to_payoff(const PriceSurface& surface, const PutPayoff& payoff);

/// Largest per-row lattice-index distance.
int compare_boundaries(const ExerciseBoundary& a, const ExerciseBoundary& b);

/// Columns t, b_fd, b_model, node_distance.
std::string boundary_csv(const ExerciseBoundary& fd, const ExerciseBoundary& model);

}  // namespace amerop
