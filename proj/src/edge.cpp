#include "dsch/edge.hpp"

#include <cmath>

#include "dsch/linalg.hpp"

namespace dsch {

bool SpectralPoint::at_edge() const {
    return std::abs(lambda) < kEdgeTol || std::abs(lambda - 4.0) < kEdgeTol;
}

SpectralPoint resolve_branch(Complex lambda, Side side) {
    SpectralPoint pt;
    pt.lambda = lambda;
    pt.side = side;

    const bool edge0 = std::abs(lambda) < kEdgeTol;
    const bool edge4 = std::abs(lambda - 4.0) < kEdgeTol;
    if (edge0) {
        pt.mu = 1.0;
        pt.theta = 0.0;
        return pt;
    }
    if (edge4) {
        pt.mu = -1.0;
        pt.theta = (side == Side::minus) ? Complex(M_PI, 0) : Complex(-M_PI, 0);
        return pt;
    }

    const bool on_band = lambda.imag() == 0.0 && lambda.real() > 0.0 && lambda.real() < 4.0;
    if (on_band) {
        if (side == Side::off_axis)
            throw std::domain_error("resolve_branch: lambda inside (0,4) needs a side tag");
        double omega = lambda.real();
        double abs_theta = std::acos(0.5 * (2.0 - omega));  // in (0, pi)
        double th = (side == Side::plus) ? -abs_theta : abs_theta;
        pt.theta = th;
        pt.mu = std::polar(1.0, -th);
        return pt;
    }
    if (side != Side::off_axis)
        throw std::domain_error("resolve_branch: side tags apply only to omega in (0,4)");

    // mu^2 - (2-lambda) mu + 1 = 0; roots multiply to 1, keep the one inside the disk
    Complex q = 0.5 * (2.0 - lambda);
    Complex s = std::sqrt(q * q - 1.0);
    if (std::real(std::conj(q) * s) < 0.0) s = -s;  // align to avoid cancellation
    Complex big = q + s;
    Complex mu = 1.0 / big;
    if (std::abs(mu) > 1.0) mu = big;  // paranoia: |big| >= 1 by construction
    pt.mu = mu;
    // theta = i Log(mu): Re in [-pi, pi], Im = log|mu| < 0
    pt.theta = Complex(0, 1) * std::log(mu);

    Complex resid = 2.0 - 2.0 * pt.cos_theta() - lambda;
    if (std::abs(resid) > 1e-12 * std::max(1.0, std::abs(lambda)))
        throw std::runtime_error("resolve_branch: branch residual out of tolerance");
    return pt;
}

Kernel free_resolvent_kernel(const SpectralPoint& pt, Window w) {
    if (pt.at_edge())
        throw std::domain_error("free_resolvent_kernel: band edge is singular; use puiseux_free_terms");
    const Complex mu = pt.mu;
    const Complex denom = 1.0 - mu * mu;
    const int sz = w.size();
    std::vector<Complex> pw(static_cast<size_t>(sz) + 1);
    pw[0] = mu / denom;  // mu^{0+1}/(1-mu^2)
    for (int d = 1; d <= sz; ++d) pw[static_cast<size_t>(d)] = pw[static_cast<size_t>(d - 1)] * mu;
    Kernel K(w);
    for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j)
            K.a[static_cast<size_t>(i) * sz + j] = pw[static_cast<size_t>(std::abs(i - j))];
    return K;
}

Sequence apply_free_resolvent(const SpectralPoint& pt, const Sequence& f) {
    if (pt.at_edge())
        throw std::domain_error("apply_free_resolvent: band edge is singular");
    const Complex mu = pt.mu;
    const Complex c = mu / (1.0 - mu * mu);
    const int sz = f.window.size();
    // (R0 f)_n = c * Sum_m mu^{|n-m|} f_m via forward/backward sweeps
    std::vector<Complex> fwd(static_cast<size_t>(sz)), bwd(static_cast<size_t>(sz));
    Complex acc{};
    for (int i = 0; i < sz; ++i) {
        acc = acc * mu + f.v[static_cast<size_t>(i)];
        fwd[static_cast<size_t>(i)] = acc;  // Sum_{m<=i} mu^{i-m} f_m
    }
    acc = Complex{};
    for (int i = sz - 1; i >= 0; --i) {
        acc = acc * mu + f.v[static_cast<size_t>(i)];
        bwd[static_cast<size_t>(i)] = acc;  // Sum_{m>=i} mu^{m-i} f_m
    }
    Sequence out(f.window);
    for (int i = 0; i < sz; ++i)
        out.v[static_cast<size_t>(i)] =
            c * (fwd[static_cast<size_t>(i)] + bwd[static_cast<size_t>(i)] - f.v[static_cast<size_t>(i)]);
    return out;
}

PuiseuxFreeTerms puiseux_free_terms(const Sequence& f) {
    PuiseuxFreeTerms out{Sequence(f.window), Sequence(f.window)};
    linalg::Accumulator sre, sim;
    for (const Complex& c : f.v) {
        sre.add(c.real());
        sim.add(c.imag());
    }
    Complex half_sum = 0.5 * Complex(sre.value(), sim.value());
    for (int n = f.window.n_min; n <= f.window.n_max; ++n) {
        out.r_minus1_of_f.ref(n) = half_sum;
        linalg::Accumulator re, im;
        for (int m = f.window.n_min; m <= f.window.n_max; ++m) {
            Complex term = -0.5 * std::abs(n - m) * f.at(m);
            re.add(term.real());
            im.add(term.imag());
        }
        out.r0_of_f.ref(n) = Complex(re.value(), im.value());
    }
    return out;
}

}  // namespace dsch
