// linalg.hpp — self-contained numeric kernels: compensated summation,
// pivoted tridiagonal and dense solvers, power iteration for singular values,
// and symmetric tridiagonal eigensolvers (Sturm bisection + inverse iteration,
// implicit-shift QL for full decompositions).

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace dsch::linalg {

using Complex = std::complex<double>;

// Neumaier-compensated accumulator. Deterministic for a fixed visit order.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Solves T x = b for tridiagonal T with partial pivoting (LAPACK gtsv scheme).
// dl: sub-diagonal (size n-1), d: diagonal (size n), du: super-diagonal (size n-1).
// Works for indefinite/complex-shifted systems where plain Thomas elimination breaks.
// Returns false when a pivot vanishes exactly. min_pivot_ratio (if given)
// receives min |pivot| / max row scale, a cheap near-singularity detector.
template <typename T>
bool tridiag_solve(std::vector<T> dl, std::vector<T> d, std::vector<T> du,
                   std::span<const T> b, std::span<T> x, double* min_pivot_ratio = nullptr);

// Factored tridiagonal system (LAPACK gttrf/gttrs scheme): factor once,
// solve many right-hand sides without allocation.
template <typename T>
class TridiagFactor {
public:
    TridiagFactor(std::vector<T> dl, std::vector<T> d, std::vector<T> du);
    bool ok() const { return ok_; }
    double min_pivot_ratio() const { return min_pivot_ratio_; }
    void solve(std::span<const T> b, std::span<T> x) const;

private:
    std::vector<T> dl_, d_, du_, du2_;
    std::vector<char> swapped_;
    int n_;
    bool ok_ = true;
    double min_pivot_ratio_ = 1.0;
};

extern template class TridiagFactor<double>;
extern template class TridiagFactor<Complex>;

// Dense LU with partial pivoting, row-major storage.
template <typename T>
class DenseLU {
public:
    // Factors a copy of the n x n matrix.
    DenseLU(std::vector<T> a, int n);
    bool singular() const { return singular_; }
    void solve(std::span<const T> b, std::span<T> x) const;
    std::vector<T> solve(const std::vector<T>& b) const;

private:
    std::vector<T> lu_;
    std::vector<int> piv_;
    int n_;
    bool singular_ = false;
};

extern template class DenseLU<double>;
extern template class DenseLU<Complex>;
extern template bool tridiag_solve<double>(std::vector<double>, std::vector<double>, std::vector<double>,
                                           std::span<const double>, std::span<double>, double*);
extern template bool tridiag_solve<Complex>(std::vector<Complex>, std::vector<Complex>, std::vector<Complex>,
                                            std::span<const Complex>, std::span<Complex>, double*);

// Largest singular value of a linear map given by matching apply/adjoint-apply
// callbacks, via power iteration on A* A with a fixed deterministic start.
double largest_singular_value(int dim,
                              const std::function<void(std::span<const Complex>, std::span<Complex>)>& apply,
                              const std::function<void(std::span<const Complex>, std::span<Complex>)>& apply_adjoint,
                              double rel_tol = 1e-11, int max_iter = 4000);

// Largest singular value of a dense row-major complex matrix with diagonal
// row/column scalings: effectively of diag(rw) * A * diag(cw).
double largest_singular_value_scaled(std::span<const Complex> a, int n,
                                     std::span<const double> row_weights,
                                     std::span<const double> col_weights);

// --- symmetric tridiagonal eigensolvers (diagonal d, off-diagonal e, e[i] couples i and i+1) ---

// Number of eigenvalues strictly below x (Sturm sequence count).
int sturm_count_below(std::span<const double> d, std::span<const double> e, double x);

// All eigenvalues in (lo, hi], each bisected to abs_tol. Ascending.
std::vector<double> tridiag_eigenvalues_in(std::span<const double> d, std::span<const double> e,
                                           double lo, double hi, double abs_tol = 1e-13);

// Eigenvector for an isolated eigenvalue via shifted inverse iteration.
// Orthogonalizes against the given previously computed vectors (same cluster).
// Returns the attained residual ||(T - lambda) v||.
double tridiag_inverse_iteration(std::span<const double> d, std::span<const double> e, double lambda,
                                 std::span<double> v,
                                 const std::vector<std::vector<double>>& orthogonalize_against = {});

// Full eigendecomposition by implicit-shift QL with eigenvector accumulation
// (EISPACK tql2 scheme). Ascending eigenvalues; vectors orthonormal, stored as
// columns of z (row-major n x n). O(n^3); intended for moderate n.
void tridiag_eig_all(std::vector<double> d, std::vector<double> e,
                     std::vector<double>& eigenvalues, std::vector<double>& z);

}  // namespace dsch::linalg
