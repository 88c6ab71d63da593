#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "amerop/errors.hpp"

namespace amerop {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Tridiagonal operator on the interior nodes of a 1-d lattice.
///
/// Row i reads lower[i]*v[i-1] + diag[i]*v[i] + upper[i]*v[i+1]. The
/// couplings lower[0] and upper[n-1] point at the Dirichlet nodes outside
/// the block; they are kept so callers can move boundary values onto the
/// right-hand side, and the solvers below ignore them.
template <typename Scalar>
struct TridiagonalSystem {
    Vec<Scalar> lower;
    Vec<Scalar> diag;
    Vec<Scalar> upper;

    [[nodiscard]] Eigen::Index size() const { return diag.size(); }

    void check() const {
        if (lower.size() != diag.size() || upper.size() != diag.size() || diag.size() == 0) {
            throw ShapeError("tridiagonal system: lower/diag/upper lengths differ or are empty");
        }
    }

    /// Matrix-vector product restricted to the block (boundary couplings dropped).
    [[nodiscard]] Vec<Scalar> apply(const Vec<Scalar>& v) const {
        check();
        const Eigen::Index n = size();
        if (v.size() != n) throw ShapeError("tridiagonal apply: vector length mismatch");
        Vec<Scalar> out(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar acc = diag[i] * v[i];
            if (i > 0) acc += lower[i] * v[i - 1];
            if (i + 1 < n) acc += upper[i] * v[i + 1];
            out[i] = acc;
        }
        return out;
    }
};

inline constexpr double kPivotFloor = 1e-14;

/// Thomas algorithm. Throws SingularSystem when a pivot drops below 1e-14
/// in magnitude.
template <typename Scalar>
Vec<Scalar> thomas_solve(const TridiagonalSystem<Scalar>& sys, const Vec<Scalar>& rhs) {
    sys.check();
    const Eigen::Index n = sys.size();
    if (rhs.size() != n) throw ShapeError("thomas_solve: rhs length mismatch");

    Vec<Scalar> c_prime(n);
    Vec<Scalar> d_prime(n);
    Scalar pivot = sys.diag[0];
    if (std::abs(pivot) < kPivotFloor) throw SingularSystem("thomas_solve: zero pivot at row 0");
    c_prime[0] = sys.upper[0] / pivot;
    d_prime[0] = rhs[0] / pivot;
    for (Eigen::Index i = 1; i < n; ++i) {
        pivot = sys.diag[i] - sys.lower[i] * c_prime[i - 1];
        if (std::abs(pivot) < kPivotFloor) {
            throw SingularSystem("thomas_solve: zero pivot at row " + std::to_string(i));
        }
        c_prime[i] = (i + 1 < n) ? sys.upper[i] / pivot : Scalar(0);
        d_prime[i] = (rhs[i] - sys.lower[i] * d_prime[i - 1]) / pivot;
    }
    Vec<Scalar> x(n);
    x[n - 1] = d_prime[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    return x;
}

/// Projected SOR for the linear complementarity problem
///   x >= obstacle,  A x - rhs >= 0,  (x - obstacle)^T (A x - rhs) = 0.
/// Stops when the max-norm of a full sweep's update is below tol.
template <typename Scalar>
Vec<Scalar> psor_solve(const TridiagonalSystem<Scalar>& sys, const Vec<Scalar>& rhs,
                       const Vec<Scalar>& obstacle, Scalar omega, Scalar tol, int max_iter,
                       const Vec<Scalar>* initial_guess = nullptr) {
    sys.check();
    const Eigen::Index n = sys.size();
    if (rhs.size() != n || obstacle.size() != n) {
        throw ShapeError("psor_solve: rhs/obstacle length mismatch");
    }
    if (!(omega > Scalar(0) && omega < Scalar(2))) throw DomainError("psor_solve: omega must lie in (0,2)");
    if (!(tol > Scalar(0))) throw DomainError("psor_solve: tol must be positive");
    if (max_iter < 1) throw DomainError("psor_solve: max_iter must be >= 1");

    Vec<Scalar> x(n);
    if (initial_guess != nullptr) {
        if (initial_guess->size() != n) throw ShapeError("psor_solve: initial guess length mismatch");
        x = initial_guess->cwiseMax(obstacle);
    } else {
        x = rhs.cwiseQuotient(sys.diag).cwiseMax(obstacle);
    }

    for (int iter = 0; iter < max_iter; ++iter) {
        Scalar max_update(0);
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar residual = rhs[i];
            if (i > 0) residual -= sys.lower[i] * x[i - 1];
            if (i + 1 < n) residual -= sys.upper[i] * x[i + 1];
            const Scalar gauss_seidel = residual / sys.diag[i];
            const Scalar updated = std::max(obstacle[i], x[i] + omega * (gauss_seidel - x[i]));
            max_update = std::max(max_update, Scalar(std::abs(updated - x[i])));
            x[i] = updated;
        }
        if (max_update < tol) return x;
    }
    throw ConvergenceFailure("psor_solve: no convergence within " + std::to_string(max_iter) +
                             " iterations");
}

}  // namespace amerop
