// edge.hpp — resolution of the spectral branch theta(lambda), the free
// resolvent kernel, and its Puiseux terms at the band edge.

#pragma once

#include "dsch/lattice.hpp"

namespace dsch {

enum class Side { plus, minus, off_axis };

// Spectral parameter with resolved branch data: 2 - 2 cos(theta) = lambda,
// mu = e^{-i theta}. Off the band [0,4]: Im(theta) < 0, |mu| < 1. On the band,
// theta_plus in (-pi, 0) and theta_minus = -theta_plus.
struct SpectralPoint {
    Complex lambda;
    Side side = Side::off_axis;
    Complex theta;
    Complex mu;

    Complex cos_theta() const { return 0.5 * (mu + 1.0 / mu); }
    Complex sin_theta() const { return Complex(0, 0.5) * (mu - 1.0 / mu); }
    bool at_edge() const;       // lambda within edge tolerance of 0 or 4
    bool on_axis() const { return side != Side::off_axis; }
};

// |lambda| or |lambda - 4| below this is treated as an exact band edge.
inline constexpr double kEdgeTol = 1e-14;

// Solves 2 - 2 cos(theta) = lambda via the quadratic mu^2 - (2-lambda) mu + 1 = 0,
// keeping the root with |mu| <= 1. For lambda strictly inside (0,4) the side tag
// breaks the tie between the conjugate unimodular roots; passing side = off_axis
// there is rejected.
SpectralPoint resolve_branch(Complex lambda, Side side);

// Free resolvent kernel K_{n,m} = mu^{|n-m|+1} / (1 - mu^2)
// (= -i/(2 sin theta) e^{-i theta |n-m|}). Rejects band-edge points; use
// puiseux_free_terms there.
Kernel free_resolvent_kernel(const SpectralPoint& pt, Window w);

// Column of the free resolvent, (R_0(lambda) f)_n, without materializing the kernel.
Sequence apply_free_resolvent(const SpectralPoint& pt, const Sequence& f);

// Leading Puiseux terms of R_0 at the lower edge:
//   (R_{-1} f)_n = (1/2) Sum_m f_m            (constant sequence)
//   (R_0  f)_n = -(1/2) Sum_m |n-m| f_m
// so that R_0^{±}(omega) f = ± i (R_{-1} f)/sqrt(omega) + R_0 f + O(sqrt(omega)).
struct PuiseuxFreeTerms {
    Sequence r_minus1_of_f;
    Sequence r0_of_f;
};
PuiseuxFreeTerms puiseux_free_terms(const Sequence& f);

}  // namespace dsch
