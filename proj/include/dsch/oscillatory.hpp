// oscillatory.hpp — quadrature of integrals ∫ e^{i t h(theta)} g(theta) dtheta
// for the lattice phase family h(theta) = 2 - 2 cos(theta) - a theta, the
// smooth cutoff partition chi0/chi around the band edges, and sup-over-a
// decay measurements.

#pragma once

#include <functional>
#include <span>

#include "dsch/lattice.hpp"

namespace dsch {

// Phase h(theta) = 2 - 2 cos(theta) - a theta. Two derivative normalizations
// are exposed: dphase is the calculus derivative 2 sin(theta) - a, used for
// stationary-point seeding; dphase_bound is the doubled 4 sin(theta) - a
// normalization under which the uniform lower bound (h')^2 + (h'')^2 >= 8
// holds on supp chi0 (the degenerate-point classifier is the same either way).
struct PhaseSpec {
    double a = 0.0;

    double phase(double th) const { return 2.0 - 2.0 * std::cos(th) - a * th; }
    double dphase(double th) const { return 2.0 * std::sin(th) - a; }
    double d2phase(double th) const { return 2.0 * std::cos(th); }
    double d3phase(double th) const { return -2.0 * std::sin(th); }
    double dphase_bound(double th) const { return 4.0 * std::sin(th) - a; }
    double d2phase_bound(double th) const { return 4.0 * std::cos(th); }

    // Stationary points 2 sin(theta) = a inside (lo, hi), plus the degenerate
    // points ±pi/2 (where h'' vanishes when a = ±2). Sorted.
    std::vector<double> panel_seeds(double lo, double hi) const;
};

// Smooth partition of unity chi0 + chi = 1 on [-pi, pi] built from the
// exp(-1/x) mollifier: chi0 = 1 near 0 and ±pi, chi = 1 on the mid-band,
// supp chi0 within theta0 of {0, ±pi}, supp chi within [theta0/2, pi-theta0/2]
// and its mirror. theta0 must lie in (0, pi/4]; larger values are reassigned
// to pi/4 (clamped flag set).
struct CutoffPair {
    double theta0 = M_PI / 4.0;
    bool clamped = false;

    double chi0(double th) const;
    double chi(double th) const { return 1.0 - chi0(th); }
};
CutoffPair build_cutoffs(double theta0);

// Smooth spectral cutoffs chi1 + chi2 = 1 on [0,4] with supp chi1 in [0,3]
// and supp chi2 in [1,4], from the same mollifier family as chi0/chi.
struct OmegaCutoffPair {
    double chi1(double omega) const;
    double chi2(double omega) const { return 1.0 - chi1(omega); }
};
OmegaCutoffPair build_omega_cutoffs();

struct QuadResult {
    Complex value{};
    double err_estimate = 0.0;
    bool converged = true;
    int panels = 0;
};

// Adaptive Gauss-Legendre panels: base count max(64, ceil(8 t)) distributed
// over sub-intervals split at the stationary points of h, doubled until two
// successive refinements agree to rel 1e-9 / abs 1e-12 (at most 4 doublings;
// non-convergence returns the best value with converged = false).
QuadResult oscillatory_integral(double t, const PhaseSpec& phase, const std::function<double(double)>& g,
                                double lo, double hi);

std::vector<double> make_a_grid(double lo = -4.0, double hi = 4.0, double step = 0.01);

struct SupOverAResult {
    double sup = 0.0;
    double a_at_sup = 0.0;
    double err_estimate = 0.0;
    bool converged = true;
};

// sup over the a-grid of |∫_{-pi}^{pi} e^{i t (2 - 2 cos theta - a theta)} g(theta) dtheta|.
// Shares one quadrature rule across the grid (the a-dependent factor e^{-i t a theta}
// is advanced by a per-node geometric recurrence); the rule is refined once and the
// grid-wide disagreement reported. Values match oscillatory_integral per a.
SupOverAResult sup_over_a_decay(double t, const std::function<double(double)>& g, std::span<const double> a_grid);

// Per-a table variant, for CSV export: fills |I(a)| for each grid point.
SupOverAResult sup_over_a_table(double t, const std::function<double(double)>& g, std::span<const double> a_grid,
                                std::vector<double>& abs_values);

// 16-point Gauss-Legendre rule on [-1, 1] (nodes ascending), computed once.
const std::vector<double>& gauss_nodes16();
const std::vector<double>& gauss_weights16();

}  // namespace dsch
