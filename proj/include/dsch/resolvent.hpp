// resolvent.hpp — the perturbed resolvent R(lambda) = (-Delta + V - lambda)^{-1}
// by two independent routes (Jost Green function; pivoted truncated solve),
// the T-operator family of the edge expansion, the explicit R(0), and
// limiting-absorption gap evaluation in weighted operator norms.

#pragma once

#include "dsch/edge.hpp"
#include "dsch/jost.hpp"
#include "dsch/lattice.hpp"

namespace dsch {

// Green-function route: K_{n,m} = psi+_{max(n,m)} psi-_{min(n,m)} / W(theta).
// Exact on the infinite lattice for compact V; valid on the axis (side ±) and
// off the axis. Signals if |W| collapses (embedded eigenvalue — cannot happen
// for real V; surfacing it is a test failure).
Kernel resolvent_kernel_jost(const Potential& V, const SpectralPoint& pt, Window w);
Kernel resolvent_kernel_jost(const Potential& V, double omega, Side side, Window w);

// Application form of the Jost route, O(window) per vector via prefix sums.
void apply_resolvent_jost(const JostWorkspace& jw, std::span<const Complex> in, std::span<Complex> out);

// Truncated-solve route: columns of (H_N - lambda)^{-1} with Dirichlet
// truncation, pivoted tridiagonal elimination. Throws with the nearest
// truncated eigenvalue when the shifted system is singular.
Kernel resolvent_truncated_solve(const Potential& V, Complex lambda, Window w);

// One column/application of the truncated solve.
void apply_resolvent_truncated(const Potential& V, Complex lambda, Window w,
                               std::span<const Complex> in, std::span<Complex> out);

// The lower-edge expansion T(omega) = i T_{-1}/sqrt(omega) + T_0 + O(sqrt(omega)):
//   (T_{-1} f)_n = (1/2) Sum_m V_m f_m          (rank <= 1)
//   (T_0  f)_n = f_n - (1/2) Sum_m |n-m| V_m f_m
// S_0 = T_0^{-1} on the window. T_0 - I has nonzero columns only on supp V,
// so S_0 reduces to a dense solve on the support block.
struct TOperators {
    Window window;
    Kernel t_minus1;
    Kernel t0;
    Kernel s0;
    bool t0_singular = false;   // support block singular or cond > 1e12
    double cond_estimate = 0.0; // Frobenius condition estimate of the support block
};
TOperators t_operators(const Potential& V, Window w);

// S_0 = T_0^{-1} as an O(window * supp) applier (no kernel materialization).
class ZeroEnergyInverse {
public:
    explicit ZeroEnergyInverse(const Potential& V);
    bool singular() const { return singular_; }
    double cond_estimate() const { return cond_; }
    // <V, S_0 1>; the T_0-route genericity pairing. Window-independent.
    double pairing() const { return pairing_; }

    void apply(Window w, std::span<const Complex> f, std::span<Complex> u) const;
    Sequence apply(const Sequence& f) const;

private:
    Potential V_;
    std::vector<int> sites_;            // support range [a, b]
    std::vector<double> block_inv_;     // (I - C_SS)^{-1}, row-major
    bool singular_ = false;
    double cond_ = 0.0;
    double pairing_ = 0.0;
};

// T_0-route genericity: support block nonsingular and <V, T_0^{-1} 1> != 0.
struct T0Genericity {
    bool generic;
    double pairing;       // <V, T_0^{-1} 1>
    bool t0_singular;
    double cond_estimate;
};
T0Genericity t0_genericity(const Potential& V);

// Explicit zero-energy resolvent of the edge expansion:
//   R(0) psi = S0 R0 psi + (<1,psi>/<V,S0 1> - <V,S0 R0 psi>/<V,S0 1>) S0 1
// with R0 the constant Puiseux term. Rejects non-generic V.
Sequence resolvent_at_zero(const Potential& V, const Sequence& psi);
Kernel resolvent_at_zero_kernel(const Potential& V, Window w);

// || R(omega + i eps) - R^+(omega) ||_{B(sigma,-sigma)} by power iteration on
// the weighted difference of the two routes, on a window growing like 1/eps
// (chosen so Dirichlet reflections are below the measured gap).
double limiting_absorption_gap(const Potential& V, double omega, double eps, double sigma);

// || R(omega + i eps) - R(omega + i eps') ||_{B(sigma,-sigma)}, both by the
// truncated solve on the window adequate for the smaller eps.
double resolvent_cauchy_gap(const Potential& V, double omega, double eps1, double eps2, double sigma);

// Support-restricted composition (A V B)(n,m) = Sum_{k in supp V} A(n,k) V_k B(k,m).
// Exact for kernels of operators sandwiched through a compact V.
Kernel compose_through_potential(const Kernel& A, const Potential& V, const Kernel& B);

}  // namespace dsch
