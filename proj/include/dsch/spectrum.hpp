// spectrum.hpp — discrete spectrum of the truncated H (eigenvalues outside
// [0,4]), eigenprojections, and the a.c. projection P_ac = I - Sum_j P_j.

#pragma once

#include "dsch/lattice.hpp"

namespace dsch {

struct EigenPair {
    double omega;         // eigenvalue, outside [0,4]
    RealSequence vector;  // unit l^2 norm on the window
};

struct SpectralDecomposition {
    Window window;
    std::vector<EigenPair> pairs;  // ascending omega
    Kernel p_ac;                   // I - Sum_j v_j v_j^T
};

// Thrown when an outside-band eigenvector fails the boundary-decay filter.
struct WindowTooSmall : std::runtime_error {
    int suggested_halfwidth;
    WindowTooSmall(const std::string& what, int suggested)
        : std::runtime_error(what), suggested_halfwidth(suggested) {}
};

inline constexpr double kBandPad = 1e-9;        // delta_band around [0,4]
inline constexpr double kBoundaryDecayTol = 1e-10;

// All eigenvalues of the Dirichlet-truncated H outside [-delta_band, 4+delta_band],
// by Sturm bisection + inverse iteration. Candidates whose eigenvector mass at the
// window boundary exceeds kBoundaryDecayTol * ||v|| are truncation artifacts and
// raise WindowTooSmall. Near-degenerate clusters (gap < 1e-10) are orthonormalized.
SpectralDecomposition discrete_spectrum(const Potential& V, Window w);

// Full eigendecomposition of the truncated H (implicit-shift QL). Eigenvectors
// stored column-major: component i of vector j at vectors[j*dim + i].
struct Eigensystem {
    Window window;
    int dim = 0;
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column-major, orthonormal
    std::span<const double> vec(int j) const {
        return {&vectors[static_cast<size_t>(j) * dim], static_cast<size_t>(dim)};
    }
};
Eigensystem full_eigensystem(const Potential& V, Window w);

}  // namespace dsch
