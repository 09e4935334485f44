#include "dsch/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsch/edge.hpp"
#include "dsch/linalg.hpp"

namespace dsch {

namespace {

void truncated_matrix(const Potential& V, Window w, std::vector<double>& d, std::vector<double>& e) {
    const int sz = w.size();
    d.resize(static_cast<size_t>(sz));
    e.assign(static_cast<size_t>(sz - 1), -1.0);
    for (int i = 0; i < sz; ++i) d[static_cast<size_t>(i)] = 2.0 + V(w.site(i));
}

int suggested_halfwidth(const Potential& V, double omega, int current) {
    // bound states decay like |mu(omega)|^{|n|}; ask for 1e-12 at the boundary
    double absmu = std::abs(resolve_branch(Complex(omega, 0.0), Side::off_axis).mu);
    if (!(absmu > 0.0 && absmu < 1.0)) return 2 * current;
    int reach = V.empty() ? 0 : std::max(std::abs(V.support_min()), std::abs(V.support_max()));
    int need = reach + static_cast<int>(std::ceil(std::log(1e-12) / std::log(absmu)));
    return std::max(need, current + current / 2);
}

}  // namespace

SpectralDecomposition discrete_spectrum(const Potential& V, Window w) {
    if (!V.empty() && !(w.contains(V.support_min()) && w.contains(V.support_max())))
        throw std::invalid_argument("discrete_spectrum: window does not contain the support of V");
    const int sz = w.size();
    std::vector<double> d, e;
    truncated_matrix(V, w, d, e);

    double vmin = 0.0, vmax = 0.0;
    for (double x : V.values()) {
        vmin = std::min(vmin, x);
        vmax = std::max(vmax, x);
    }
    const double lo_edge = vmin - 1e-8;        // omega_min = min{0, V_n}
    const double hi_edge = 4.0 + vmax + 1e-8;  // omega_max = max{4, 4 + V_n}

    std::vector<double> candidates;
    for (double ev : linalg::tridiag_eigenvalues_in(d, e, lo_edge, -kBandPad)) candidates.push_back(ev);
    for (double ev : linalg::tridiag_eigenvalues_in(d, e, 4.0 + kBandPad, hi_edge)) candidates.push_back(ev);
    std::sort(candidates.begin(), candidates.end());

    SpectralDecomposition out;
    out.window = w;

    std::vector<std::vector<double>> cluster;  // previously accepted vectors of the current cluster
    double cluster_omega = 0.0;
    for (double omega : candidates) {
        if (!cluster.empty() && std::abs(omega - cluster_omega) >= 1e-10) cluster.clear();
        std::vector<double> v(static_cast<size_t>(sz));
        linalg::tridiag_inverse_iteration(d, e, omega, v, cluster);
        // unit norm
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;

        double boundary = std::max(std::abs(v.front()), std::abs(v.back()));
        if (boundary > kBoundaryDecayTol) {
            std::ostringstream msg;
            msg << "discrete_spectrum: eigenvector at omega = " << omega
                << " fails boundary decay (|v| = " << boundary
                << " at the window edge); enlarge the window";
            throw WindowTooSmall(msg.str(), suggested_halfwidth(V, omega, (w.n_max - w.n_min) / 2));
        }
        cluster.push_back(v);
        cluster_omega = omega;
        EigenPair pair;
        pair.omega = omega;
        pair.vector = RealSequence(w);
        pair.vector.v = std::move(v);
        out.pairs.push_back(std::move(pair));
    }

    out.p_ac = Kernel::identity(w);
    for (const EigenPair& p : out.pairs)
        for (int i = 0; i < sz; ++i) {
            double vi = p.vector.v[static_cast<size_t>(i)];
            if (vi == 0.0) continue;
            for (int j = 0; j < sz; ++j)
                out.p_ac.a[static_cast<size_t>(i) * sz + j] -= vi * p.vector.v[static_cast<size_t>(j)];
        }
    return out;
}

Eigensystem full_eigensystem(const Potential& V, Window w) {
    const int sz = w.size();
    std::vector<double> d, e;
    truncated_matrix(V, w, d, e);
    Eigensystem out;
    out.window = w;
    out.dim = sz;
    std::vector<double> z;
    linalg::tridiag_eig_all(d, e, out.values, z);
    // row-major z (columns = vectors) -> column-major storage
    out.vectors.resize(static_cast<size_t>(sz) * sz);
    for (int j = 0; j < sz; ++j)
        for (int i = 0; i < sz; ++i)
            out.vectors[static_cast<size_t>(j) * sz + i] = z[static_cast<size_t>(i) * sz + j];
    return out;
}

}  // namespace dsch
