// evolution.hpp — the propagator e^{itH} P_ac by two routes: the unfolded
// spectral theta-integral
//   K_{n,m}(t) = (i/pi) ∫_{-pi}^{pi} e^{i t (2-2cos th)} psi+_{max} psi-_{min} sin(th)/W(th) dth
// (exact on the infinite lattice for compact V), and the truncated
// eigendecomposition oracle. Plus the free closed form, spectrally filtered
// integrals, and time-decay series with fitted exponents.

#pragma once

#include <functional>

#include "dsch/lattice.hpp"
#include "dsch/spectrum.hpp"

namespace dsch {

struct EvolutionKernel {
    double t = 0.0;
    Kernel kernel;
    double quad_error = 0.0;  // max-entry disagreement of the panel-doubling check
    bool converged = true;
};

// e^{i t H_0} on the window (Toeplitz; entries e^{2it} (-i)^{n-m} J_{n-m}(2t),
// evaluated here by oscillatory quadrature, not by Bessel functions).
EvolutionKernel evolve_free_kernel(double t, Window w);

// e^{i t H} P_ac(H) for generic V (rejects non-generic V, where W(0) = 0).
EvolutionKernel evolve_ac_kernel(const Potential& V, double t, Window w);

// ∫_0^4 e^{i t omega} Im R(omega) omega_cut(omega) domega as a kernel
// (the theta-unfolded form; omega_cut == 1 recovers pi * e^{itH} P_ac).
EvolutionKernel spectral_filter_kernel(const Potential& V, double t, Window w,
                                       const std::function<double(double)>& omega_cut);

// Eigendecomposition route: Sum over non-bound modes of e^{i t omega_k} u_k u_k^T
// on the truncated window. Bound modes are those outside [0,4] passing the
// boundary-decay filter. Trustworthy on |n|,|m| <= N - 2t - margin.
Kernel evolve_oracle_kernel(const Eigensystem& es, double t);
Kernel evolve_oracle_kernel(const Potential& V, double t, Window w);

enum class NormKind { weighted, l1_inf };

struct DecaySample {
    double t;
    double norm;
    double quad_error;
};

struct DecaySeries {
    NormKind kind = NormKind::weighted;
    double sigma = 3.0;
    std::vector<DecaySample> samples;
    double slope = 0.0;      // least-squares fit of log(norm) vs log(t) over [fit_tmin, inf)
    double intercept = 0.0;  // log C
    double fit_residual = 0.0;
    double fit_tmin = 50.0;
};

struct DecayOptions {
    double fit_tmin = 50.0;
    int weighted_obs_halfwidth = 200;  // weights (1+n^2)^{-sigma/2} make the tail negligible
    int strip_halfwidth = 8;           // column strip for the l1->linf sup (rows span the window)
};

// Norm samples of e^{itH} P_ac over the time grid and the fitted decay
// exponent. The window must satisfy N >= 2 max(t) + 50 (group velocities lie
// in [-2,2], so the light cone must stay inside). For weighted norms the
// operator is measured in B(sigma,-sigma); for l1_inf as max |K_{n,m}| over a
// column strip crossed with the full window, which covers the |n-m| ~ 2t
// caustic where the sup lives. Empty V is routed through the free propagator.
DecaySeries decay_series(const Potential& V, double sigma, const std::vector<double>& times, NormKind kind,
                         int window_halfwidth, const DecayOptions& opt = {});

// Single-time norm evaluations (the pieces decay_series samples).
double ac_norm_b1inf(const Potential& V, double t, int window_halfwidth, int strip_halfwidth, double* quad_err);
double ac_norm_weighted(const Potential& V, double t, double sigma, int obs_halfwidth, double* quad_err);

// Least-squares slope/intercept of log(y) vs log(x); returns rms residual.
double fit_loglog(std::span<const double> x, std::span<const double> y, double& slope, double& intercept);

}  // namespace dsch
