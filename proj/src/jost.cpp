#include "dsch/jost.hpp"

#include <cmath>

#include "dsch/linalg.hpp"

namespace dsch {

namespace {

constexpr double kSinThetaFloor = 1e-13;

// Summation-equation coefficient for the f+ recursion,
//   g(k) = -(i / (2 sin theta)) (1 - mu^{2k}) = mu (1 - mu^{2k}) / (1 - mu^2),
// k = m - n >= 1. On the axis (|mu| = 1, theta real) the stable form is the
// Dirichlet ratio g(k) = e^{-i k theta} sin(k theta) / sin(theta).
struct BranchEval {
    Complex mu;
    bool on_axis;
    double theta_r;          // real theta when on_axis
    Complex mu2;             // mu^2
    Complex one_minus_mu2;   // 1 - mu^2

    explicit BranchEval(const SpectralPoint& pt)
        : mu(pt.mu),
          on_axis(pt.on_axis() && pt.theta.imag() == 0.0),
          theta_r(pt.theta.real()),
          mu2(pt.mu * pt.mu),
          one_minus_mu2(1.0 - pt.mu * pt.mu) {}

    Complex g(int k) const {
        if (on_axis) {
            double s = std::sin(theta_r);
            return std::polar(1.0, -k * theta_r) * (std::sin(k * theta_r) / s);
        }
        if (std::abs(one_minus_mu2) > 1e-6)
            return mu * (1.0 - std::pow(mu2, k)) / one_minus_mu2;
        Complex sum{}, p = mu;
        for (int j = 0; j < k; ++j) {
            sum += p;
            p *= mu2;
        }
        return sum;
    }

    // d g / d theta
    Complex dg(int k) const {
        if (on_axis) {
            double s = std::sin(theta_r), c = std::cos(theta_r);
            double sk = std::sin(k * theta_r), ck = std::cos(k * theta_r);
            Complex ph = std::polar(1.0, -k * theta_r);
            return Complex(0, -double(k)) * ph * (sk / s) + ph * ((k * ck * s - sk * c) / (s * s));
        }
        if (std::abs(one_minus_mu2) > 1e-4) {
            // dg/dtheta = g'(mu) * dmu/dtheta, dmu/dtheta = -i mu
            Complex mk = std::pow(mu2, k);
            Complex gp = (1.0 + mu2 - (2.0 * k + 1.0) * mk + (2.0 * k - 1.0) * mk * mu2) /
                         (one_minus_mu2 * one_minus_mu2);
            return gp * Complex(0, -1) * mu;
        }
        Complex sum{}, p = mu;
        for (int j = 0; j < k; ++j) {
            sum += Complex(0, -(2.0 * j + 1.0)) * p;
            p *= mu2;
        }
        return sum;
    }
};

}  // namespace

Complex wronskian_at(const Sequence& u, const Sequence& v, int n) {
    return u.at(n) * v.at(n + 1) - u.at(n + 1) * v.at(n);
}

JostData jost_pair(const Potential& V, const SpectralPoint& pt, Window w, bool with_derivatives) {
    if (std::abs(pt.sin_theta()) < kSinThetaFloor)
        throw std::domain_error("jost_pair: sin(theta) = 0 at a band edge; use zero_energy_jost");
    if (!V.empty() && !(w.contains(V.support_min()) && w.contains(V.support_max())))
        throw std::invalid_argument("jost_pair: window does not contain the support of V");

    const BranchEval br(pt);
    const int lo = w.n_min, hi = w.n_max;
    const int a = V.empty() ? hi + 1 : V.support_min();
    const int b = V.empty() ? lo - 1 : V.support_max();

    JostData out;
    out.pt = pt;
    out.window = w;
    out.f_plus = Sequence(w);
    out.f_minus = Sequence(w);
    out.df_plus = Sequence(w);
    out.df_minus = Sequence(w);

    // f+ : backward through the support, then the free three-term recursion below it
    for (int n = hi; n >= lo; --n) {
        if (n > b) {
            out.f_plus.ref(n) = 1.0;
            continue;
        }
        if (n >= a - 1) {
            Complex s = 1.0;
            for (int m = std::max(n + 1, a); m <= b; ++m)
                if (V(m) != 0.0) s += br.g(m - n) * V(m) * out.f_plus.at(m);
            out.f_plus.ref(n) = s;
        } else {
            // V = 0 here: f+_{n} = (1 + mu^2) f+_{n+1} - mu^2 f+_{n+2}
            out.f_plus.ref(n) = (1.0 + br.mu2) * out.f_plus.at(n + 1) - br.mu2 * out.f_plus.at(n + 2);
        }
    }
    // f- : forward through the support, free recursion above it
    for (int n = lo; n <= hi; ++n) {
        if (n < a) {
            out.f_minus.ref(n) = 1.0;
            continue;
        }
        if (n <= b + 1) {
            Complex s = 1.0;
            for (int m = a; m <= std::min(n - 1, b); ++m)
                if (V(m) != 0.0) s += br.g(n - m) * V(m) * out.f_minus.at(m);
            out.f_minus.ref(n) = s;
        } else {
            out.f_minus.ref(n) = (1.0 + br.mu2) * out.f_minus.at(n - 1) - br.mu2 * out.f_minus.at(n - 2);
        }
    }

    if (with_derivatives) {
        const Complex dmu2 = Complex(0, -2) * br.mu2;  // d(mu^2)/dtheta
        for (int n = hi; n >= lo; --n) {
            if (n > b) {
                out.df_plus.ref(n) = 0.0;
                continue;
            }
            if (n >= a - 1) {
                Complex s{};
                for (int m = std::max(n + 1, a); m <= b; ++m)
                    if (V(m) != 0.0)
                        s += V(m) * (br.dg(m - n) * out.f_plus.at(m) + br.g(m - n) * out.df_plus.at(m));
                out.df_plus.ref(n) = s;
            } else {
                out.df_plus.ref(n) = (1.0 + br.mu2) * out.df_plus.at(n + 1) - br.mu2 * out.df_plus.at(n + 2) +
                                     dmu2 * (out.f_plus.at(n + 1) - out.f_plus.at(n + 2));
            }
        }
        for (int n = lo; n <= hi; ++n) {
            if (n < a) {
                out.df_minus.ref(n) = 0.0;
                continue;
            }
            if (n <= b + 1) {
                Complex s{};
                for (int m = a; m <= std::min(n - 1, b); ++m)
                    if (V(m) != 0.0)
                        s += V(m) * (br.dg(n - m) * out.f_minus.at(m) + br.g(n - m) * out.df_minus.at(m));
                out.df_minus.ref(n) = s;
            } else {
                out.df_minus.ref(n) = (1.0 + br.mu2) * out.df_minus.at(n - 1) - br.mu2 * out.df_minus.at(n - 2) +
                                      dmu2 * (out.f_minus.at(n - 1) - out.f_minus.at(n - 2));
            }
        }
    }

    // phases psi+_n = mu^n f+_n, psi-_n = mu^{-n} f-_n
    out.psi_plus = Sequence(w);
    out.psi_minus = Sequence(w);
    if (br.on_axis) {
        for (int n = lo; n <= hi; ++n) {
            Complex ph = std::polar(1.0, -n * br.theta_r);
            out.psi_plus.ref(n) = ph * out.f_plus.at(n);
            out.psi_minus.ref(n) = out.f_minus.at(n) / ph;
        }
    } else {
        Complex logmu = std::log(pt.mu);
        for (int n = lo; n <= hi; ++n) {
            Complex ph = std::exp(double(n) * logmu);
            out.psi_plus.ref(n) = ph * out.f_plus.at(n);
            out.psi_minus.ref(n) = out.f_minus.at(n) / ph;
        }
    }

    // W(theta) in the overflow-free normalized form, plus its n-dependence
    auto w_at = [&](int n) {
        return out.f_plus.at(n) * out.f_minus.at(n + 1) / pt.mu - pt.mu * out.f_plus.at(n + 1) * out.f_minus.at(n);
    };
    int ref_site = std::min(std::max(b, lo), hi - 1);
    out.wronskian = w_at(ref_site);
    double dev = 0.0;
    for (int n = lo; n < hi; ++n) dev = std::max(dev, std::abs(w_at(n) - out.wronskian));
    out.wronskian_deviation = dev;
    return out;
}

ZeroEnergyJost zero_energy_jost(const Potential& V, Window w) {
    if (!V.empty() && !(w.contains(V.support_min()) && w.contains(V.support_max())))
        throw std::invalid_argument("zero_energy_jost: window does not contain the support of V");
    const int lo = w.n_min, hi = w.n_max;
    const int a = V.empty() ? hi + 1 : V.support_min();
    const int b = V.empty() ? lo - 1 : V.support_max();

    ZeroEnergyJost out;
    out.window = w;
    out.psi_plus = RealSequence(w);
    out.psi_minus = RealSequence(w);

    // psi+_n = 1 + Sum_{m>n} (m-n) V_m psi+_m ; free part linear, recursed directly
    for (int n = hi; n >= lo; --n) {
        if (n > b) {
            out.psi_plus.ref(n) = 1.0;
        } else if (n >= a - 1) {
            double s = 1.0;
            for (int m = std::max(n + 1, a); m <= b; ++m)
                if (V(m) != 0.0) s += (m - n) * V(m) * out.psi_plus.at(m);
            out.psi_plus.ref(n) = s;
        } else {
            out.psi_plus.ref(n) = 2.0 * out.psi_plus.at(n + 1) - out.psi_plus.at(n + 2);
        }
    }
    for (int n = lo; n <= hi; ++n) {
        if (n < a) {
            out.psi_minus.ref(n) = 1.0;
        } else if (n <= b + 1) {
            double s = 1.0;
            for (int m = a; m <= std::min(n - 1, b); ++m)
                if (V(m) != 0.0) s += (n - m) * V(m) * out.psi_minus.at(m);
            out.psi_minus.ref(n) = s;
        } else {
            out.psi_minus.ref(n) = 2.0 * out.psi_minus.at(n - 1) - out.psi_minus.at(n - 2);
        }
    }

    linalg::Accumulator accp, accm;
    for (int m = a; m <= b; ++m) {
        accp.add(V(m) * out.psi_plus.at(m));
        accm.add(V(m) * out.psi_minus.at(m));
    }
    out.v_dot_psi_plus = accp.value();
    out.v_dot_psi_minus = accm.value();
    return out;
}

ScatteringData scattering_coeffs(const Potential& V, double theta, Window w) {
    if (!(theta > -M_PI && theta < 0.0))
        throw std::domain_error("scattering_coeffs: theta must lie in (-pi, 0)");
    double s = std::sin(theta);
    if (std::abs(s) < kSinThetaFloor) throw std::domain_error("scattering_coeffs: band-edge theta");

    double omega = 2.0 - 2.0 * std::cos(theta);
    JostData jp = jost_pair(V, resolve_branch(omega, Side::plus), w, false);
    JostData jm = jost_pair(V, resolve_branch(omega, Side::minus), w, false);
    // resolve_branch(omega, plus) has theta_+ = -|theta| = theta since theta in (-pi,0)

    const Complex two_i_sin = Complex(0, 2) * s;
    int site = V.empty() ? 0 : V.support_max();
    if (site + 1 > w.n_max) site = w.n_max - 1;
    // a = W[psi-(theta), psi+(-theta)] / (2 i sin theta); psi+(-theta) is the minus-branch psi+
    Complex wa = wronskian_at(jp.psi_minus, jm.psi_plus, site);
    ScatteringData out;
    out.theta = theta;
    out.a = wa / two_i_sin;
    out.b = jp.wronskian / two_i_sin;
    return out;
}

GenericityResult is_generic(const Potential& V) {
    int half = V.empty() ? 4 : std::max({4, std::abs(V.support_min()), std::abs(V.support_max())}) + 2;
    Window w = Window::symmetric(half);
    ZeroEnergyJost z = zero_energy_jost(V, w);
    int site = V.empty() ? 0 : V.support_max();
    double w0 = z.psi_plus.at(site) * z.psi_minus.at(site + 1) - z.psi_plus.at(site + 1) * z.psi_minus.at(site);
    GenericityResult out;
    out.w0 = w0;
    out.v_pairing = z.v_dot_psi_plus;
    out.generic = std::abs(w0) > kGenericityTol * (1.0 + V.l1_norm(1.0));
    return out;
}

void JostWorkspace::compute(const Potential& V, const SpectralPoint& pt, Window w) {
    if (std::abs(pt.sin_theta()) < kSinThetaFloor)
        throw std::domain_error("JostWorkspace: sin(theta) = 0");
    if (!V.empty() && !(w.contains(V.support_min()) && w.contains(V.support_max())))
        throw std::invalid_argument("JostWorkspace: window does not contain the support of V");
    const BranchEval br(pt);
    const int lo = w.n_min, hi = w.n_max, sz = w.size();
    const int a = V.empty() ? hi + 1 : V.support_min();
    const int b = V.empty() ? lo - 1 : V.support_max();
    window_ = w;
    f_plus_.assign(static_cast<size_t>(sz), Complex{});
    f_minus_.assign(static_cast<size_t>(sz), Complex{});
    psi_plus_.resize(static_cast<size_t>(sz));
    psi_minus_.resize(static_cast<size_t>(sz));
    auto idx = [&](int n) { return static_cast<size_t>(n - lo); };

    for (int n = hi; n >= lo; --n) {
        if (n > b) {
            f_plus_[idx(n)] = 1.0;
        } else if (n >= a - 1) {
            Complex s = 1.0;
            for (int m = std::max(n + 1, a); m <= b; ++m)
                if (V(m) != 0.0) s += br.g(m - n) * V(m) * f_plus_[idx(m)];
            f_plus_[idx(n)] = s;
        } else {
            f_plus_[idx(n)] = (1.0 + br.mu2) * f_plus_[idx(n + 1)] - br.mu2 * f_plus_[idx(n + 2)];
        }
    }
    for (int n = lo; n <= hi; ++n) {
        if (n < a) {
            f_minus_[idx(n)] = 1.0;
        } else if (n <= b + 1) {
            Complex s = 1.0;
            for (int m = a; m <= std::min(n - 1, b); ++m)
                if (V(m) != 0.0) s += br.g(n - m) * V(m) * f_minus_[idx(m)];
            f_minus_[idx(n)] = s;
        } else {
            f_minus_[idx(n)] = (1.0 + br.mu2) * f_minus_[idx(n - 1)] - br.mu2 * f_minus_[idx(n - 2)];
        }
    }

    // phases by running products (|mu| = 1 on the axis keeps them unimodular)
    const Complex mu = pt.mu, inv_mu = 1.0 / pt.mu;
    Complex ph = 1.0;
    if (w.contains(0)) {
        psi_plus_[idx(0)] = f_plus_[idx(0)];
        psi_minus_[idx(0)] = f_minus_[idx(0)];
        ph = 1.0;
        for (int n = 1; n <= hi; ++n) {
            ph *= mu;
            psi_plus_[idx(n)] = ph * f_plus_[idx(n)];
            psi_minus_[idx(n)] = f_minus_[idx(n)] / ph;
        }
        ph = 1.0;
        for (int n = -1; n >= lo; --n) {
            ph *= inv_mu;
            psi_plus_[idx(n)] = ph * f_plus_[idx(n)];
            psi_minus_[idx(n)] = f_minus_[idx(n)] / ph;
        }
    } else {
        ph = std::pow(mu, lo);
        for (int n = lo; n <= hi; ++n) {
            psi_plus_[idx(n)] = ph * f_plus_[idx(n)];
            psi_minus_[idx(n)] = f_minus_[idx(n)] / ph;
            ph *= mu;
        }
    }

    int ref_site = std::min(std::max(b, lo), hi - 1);
    wronskian_ = f_plus_[idx(ref_site)] * f_minus_[idx(ref_site + 1)] * inv_mu -
                 mu * f_plus_[idx(ref_site + 1)] * f_minus_[idx(ref_site)];
}

}  // namespace dsch
