// jost.hpp — Jost solutions psi±(theta) of
//   psi_{n+1} + psi_{n-1} + (omega - 2) psi_n = V_n psi_n,
// their normalized forms f± (psi±_n = e^{∓ i n theta} f±_n, f± -> 1), the
// theta-derivatives, Wronskians, scattering coefficients, zero-energy
// solutions, and the genericity (non-resonance) test W(0) != 0.

#pragma once

#include "dsch/edge.hpp"
#include "dsch/lattice.hpp"

namespace dsch {

struct JostData {
    SpectralPoint pt;
    Window window;
    Sequence psi_plus, psi_minus;  // solutions asymptotic to e^{∓ i n theta}
    Sequence f_plus, f_minus;      // normalized forms, == 1 beyond the support
    Sequence df_plus, df_minus;    // d/dtheta of f±
    Complex wronskian;             // W(theta) = psi+_n psi-_{n+1} - psi+_{n+1} psi-_n
    double wronskian_deviation;    // max_n |W_n - W| over the window
};

// Computes both Jost solutions by explicit recursion through the compact
// support (the m = n term of the summation equation vanishes, so no linear
// solve is needed). Rejects band edges (sin theta = 0); use zero_energy_jost.
JostData jost_pair(const Potential& V, const SpectralPoint& pt, Window w, bool with_derivatives = true);

struct ZeroEnergyJost {
    Window window;
    RealSequence psi_plus, psi_minus;  // psi+ -> 1 at +inf, psi- -> 1 at -inf
    double v_dot_psi_plus;             // <V, psi+>
    double v_dot_psi_minus;            // <V, psi->
};
ZeroEnergyJost zero_energy_jost(const Potential& V, Window w);

// Coefficients of psi-(theta) = a psi+(theta) + b psi+(-theta):
//   a = W[psi-(theta), psi+(-theta)] / (2 i sin theta),
//   b = W(theta) / (2 i sin theta).
struct ScatteringData {
    double theta;
    Complex a;
    Complex b;
};
ScatteringData scattering_coeffs(const Potential& V, double theta, Window w);

// Genericity of V at the lower edge: flag = (|w0| > tol_gen (1 + ||V||_{l^1_1}))
// with w0 = W[psi+(0), psi-(0)] and tol_gen = 1e-8. v_pairing = <V, psi+(0)>,
// which equals w0 up to rounding (the two scalars cross-check each other).
struct GenericityResult {
    bool generic;
    double w0;
    double v_pairing;
};
GenericityResult is_generic(const Potential& V);

inline constexpr double kGenericityTol = 1e-8;

// Discrete Wronskian u_n v_{n+1} - u_{n+1} v_n evaluated at site n.
Complex wronskian_at(const Sequence& u, const Sequence& v, int n);

// Allocation-free fields for kernel-assembly hot loops: f± and psi± over the
// window at a given on-axis point, plus W(theta). Buffers are reused between
// calls with the same window.
class JostWorkspace {
public:
    void compute(const Potential& V, const SpectralPoint& pt, Window w);

    std::span<const Complex> f_plus() const { return f_plus_; }
    std::span<const Complex> f_minus() const { return f_minus_; }
    std::span<const Complex> psi_plus() const { return psi_plus_; }
    std::span<const Complex> psi_minus() const { return psi_minus_; }
    Complex wronskian() const { return wronskian_; }
    Window window() const { return window_; }

private:
    Window window_{0, 0};
    std::vector<Complex> f_plus_, f_minus_, psi_plus_, psi_minus_;
    Complex wronskian_{};
};

}  // namespace dsch
