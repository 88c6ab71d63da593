#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <vector>

#include "amerop/errors.hpp"
#include "amerop/mlp.hpp"
#include "amerop/sde_sim.hpp"

namespace amerop {

/// Trapezoid bump: 1 on |a|<1, 0 on |a|>2, 2-|a| in between.
template <typename Scalar>
Scalar psi(Scalar a) {
    const Scalar m = std::abs(a);
    if (m < Scalar(1)) return Scalar(1);
    if (m > Scalar(2)) return Scalar(0);
    return Scalar(2) - m;
}

/// The same bump as ReLU(a+2) - ReLU(a+1) - ReLU(a-1) + ReLU(a-2).
template <typename Scalar>
Scalar psi_relu(Scalar a) {
    auto relu = [](Scalar v) { return v > Scalar(0) ? v : Scalar(0); };
    return relu(a + Scalar(2)) - relu(a + Scalar(1)) - relu(a - Scalar(1)) + relu(a - Scalar(2));
}

/// Uniform grid {-r, -r + 2r/(N-1), ..., r}^d on the cube Q_r.
struct CenterGrid {
    double radius_r = 1.0;
    int n_per_dim = 2;
    int dim = 1;
    std::vector<Eigen::VectorXd> centers;

    [[nodiscard]] double spacing() const { return 2.0 * radius_r / (n_per_dim - 1); }
    /// Argument scale of the bump factors, 3(N-1)/(2r).
    [[nodiscard]] double bump_scale() const { return 3.0 * (n_per_dim - 1) / (2.0 * radius_r); }
    [[nodiscard]] bool contains(const Eigen::VectorXd& x) const { return x.cwiseAbs().maxCoeff() <= radius_r; }
};

CenterGrid make_center_grid(double radius_r, int n_per_dim, int dim);

/// Coarsest uniform grid on Q_r whose spacing does not exceed delta.
CenterGrid covering_grid(double radius_r, double delta, int dim);

/// prod_j psi(3(N-1)/(2r) (x_j - c_j)).
double phi_center(const Eigen::VectorXd& x, const Eigen::VectorXd& center, const CenterGrid& grid);

/// Sawtooth (Yarotsky) approximation of x^2 on [0,1] with m teeth levels;
/// error at most 2^(-2m-2).
double approx_square(double x, int m);

inline double approx_square_accuracy(int m) { return std::ldexp(1.0, -2 * m - 2); }
inline double approx_mul_accuracy(int m, double bound) { return 6.0 * bound * bound * approx_square_accuracy(m); }

struct MulApprox {
    double value;
    double declared_eps;
};

/// xy = 2M^2 [s(|x+y|/2M) - s(|x|/2M) - s(|y|/2M)] with s the sawtooth square.
MulApprox approx_mul(double x, double y, int m, double bound);

// ReLU network realizations of the constructions above.
Mlp square_network(int m);
Mlp mul_network(int m, double bound);
Mlp psi_network(double scale, double center);

struct BumpNetwork {
    Mlp net;
    NetworkClassSpec spec;  ///< envelope derived from the construction
    double mul_accuracy;    ///< delta of each approximate product
};

/// q~(x) = mul(psi_1, mul(psi_2, ... )) approximating phi_center.
BumpNetwork product_bump_network(const Eigen::VectorXd& center, const CenterGrid& grid, int m);

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// x -> sum_k g(c_k) phi_{c_k}(x) on Q_r, and 0 outside.
ScalarField piecewise_const_approx(const ScalarField& g, const CenterGrid& grid);

struct PathApproxError {
    double interior;  ///< E[(sup over in-cube times |g - g_bar|)^2]
    double tail;      ///< E[(sup over out-of-cube times |g|)^2]
    double total;     ///< E[(sup over all times |g - g_bar|)^2]
};

/// One-dimensional paths, recentered so batch.x0 sits at the cube center.
/// g takes original (un-centered) coordinates.
PathApproxError path_approx_error(const std::function<double(double)>& g, const CenterGrid& grid,
                                  const PathBatch& batch);

}  // namespace amerop
