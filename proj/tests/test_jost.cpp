#include <doctest.h>

#include "dsch/ensemble.hpp"
#include "dsch/jost.hpp"
#include "oracles.hpp"

using namespace dsch;

namespace {

// Residual of the scattering recurrence psi_{n+1} + psi_{n-1} + (omega-2) psi_n - V_n psi_n
double schrodinger_residual(const Potential& V, const Sequence& psi, Complex omega, Window w) {
    double worst = 0.0, scale = 0.0;
    for (int n = w.n_min + 1; n < w.n_max; ++n) {
        Complex r = psi.at(n + 1) + psi.at(n - 1) + (omega - 2.0) * psi.at(n) - V(n) * psi.at(n);
        worst = std::max(worst, std::abs(r));
        scale = std::max(scale, std::abs(psi.at(n)));
    }
    return worst / std::max(scale, 1.0);
}

}  // namespace

TEST_CASE("jost: free case reduces to plane waves with W = 2 i sin(theta)") {
    Window w = Window::symmetric(20);
    for (int k = 1; k < 24; ++k) {
        double theta = -M_PI * k / 24.0;
        auto pt = resolve_branch(2.0 - 2.0 * std::cos(theta), Side::plus);
        JostData jd = jost_pair(Potential::zero(), pt, w);
        for (int n = w.n_min; n <= w.n_max; ++n) {
            CHECK(std::abs(jd.f_plus.at(n) - 1.0) < 1e-13);
            CHECK(std::abs(jd.f_minus.at(n) - 1.0) < 1e-13);
            CHECK(std::abs(jd.psi_plus.at(n) - std::polar(1.0, -n * theta)) < 1e-12);
        }
        CHECK(std::abs(jd.wronskian - Complex(0, 2.0 * std::sin(theta))) < 1e-12);
        CHECK(jd.wronskian_deviation < 1e-12);
    }
}

TEST_CASE("jost: one recursion step by hand for a single-site potential") {
    Window w = Window::symmetric(10);
    double v = -1.5;
    auto pt = resolve_branch(2.0, Side::plus);  // theta = -pi/2, mu = i
    JostData jd = jost_pair(Potential::single_site(0, v), pt, w);
    for (int n = 0; n <= 10; ++n) CHECK(std::abs(jd.f_plus.at(n) - 1.0) < 1e-14);
    CHECK(std::abs(jd.f_plus.at(-1) - (1.0 + v * pt.mu)) < 1e-14);  // 1 - 1.5 i
    CHECK(std::abs(jd.f_plus.at(-1) - Complex(1.0, -1.5)) < 1e-14);

    // generic angles: f+_{-1} = 1 + v mu
    SplitMix64 rng(71);
    for (int k = 0; k < 20; ++k) {
        double theta = -rng.uniform(0.05, M_PI - 0.05);
        auto p2 = resolve_branch(2.0 - 2.0 * std::cos(theta), Side::plus);
        JostData j2 = jost_pair(Potential::single_site(0, v), p2, w);
        CHECK(std::abs(j2.f_plus.at(-1) - (1.0 + v * p2.mu)) < 1e-13);
    }
}

TEST_CASE("jost: defining recurrence and Wronskian constancy on a random ensemble") {
    Window w = Window::symmetric(40);
    SplitMix64 rng(29);
    for (int trial = 0; trial < 25; ++trial) {
        Potential V = random_compact_potential(rng);
        double theta = -rng.uniform(0.08, M_PI - 0.08);
        double omega = 2.0 - 2.0 * std::cos(theta);
        JostData jd = jost_pair(V, resolve_branch(omega, Side::plus), w);
        CHECK(schrodinger_residual(V, jd.psi_plus, omega, w) < 1e-10);
        CHECK(schrodinger_residual(V, jd.psi_minus, omega, w) < 1e-10);
        CHECK(jd.wronskian_deviation < 1e-10 * (1.0 + std::abs(jd.wronskian)));
        // psi+(-theta) = conj(psi+(theta)) for real V
        JostData jm = jost_pair(V, resolve_branch(omega, Side::minus), w);
        for (int n = w.n_min; n <= w.n_max; ++n)
            CHECK(std::abs(jm.psi_plus.at(n) - std::conj(jd.psi_plus.at(n))) < 1e-11);
    }
}

TEST_CASE("jost: off-axis points satisfy the recurrence too") {
    Window w = Window::symmetric(30);
    SplitMix64 rng(31);
    for (Complex lambda : {Complex(-0.8, 0.0), Complex(2.0, 0.35), Complex(4.9, 0.0), Complex(1.2, -0.6)}) {
        Potential V = random_compact_potential(rng);
        JostData jd = jost_pair(V, resolve_branch(lambda, Side::off_axis), w);
        CHECK(schrodinger_residual(V, jd.psi_plus, lambda, w) < 1e-10);
        CHECK(schrodinger_residual(V, jd.psi_minus, lambda, w) < 1e-10);
        CHECK(jd.wronskian_deviation < 1e-10 * (1.0 + std::abs(jd.wronskian)));
    }
}

TEST_CASE("jost: band edge is rejected") {
    Window w = Window::symmetric(10);
    CHECK_THROWS_AS(jost_pair(Potential::single_site(0, 1.0), resolve_branch(0.0, Side::plus), w),
                    std::domain_error);
}

TEST_CASE("jost: theta-derivatives match the finite-difference oracle") {
    Window w = Window::symmetric(25);
    SplitMix64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        Potential V = random_compact_potential(rng);
        double theta = -rng.uniform(0.2, M_PI - 0.2);
        double h = 1e-5;
        auto f_of_theta = [&](int site, bool plus) {
            return [&, site, plus](double th) -> Complex {
                JostData jd = jost_pair(V, resolve_branch(2.0 - 2.0 * std::cos(th), Side::plus), w, false);
                return plus ? jd.f_plus.at(site) : jd.f_minus.at(site);
            };
        };
        JostData jd = jost_pair(V, resolve_branch(2.0 - 2.0 * std::cos(theta), Side::plus), w, true);
        for (int site : {-20, -3, 0, 2, 15}) {
            Complex fd_p = oracle::central_diff(f_of_theta(site, true), theta, h);
            Complex fd_m = oracle::central_diff(f_of_theta(site, false), theta, h);
            double scale = std::abs(jd.df_plus.at(site)) + std::abs(jd.df_minus.at(site)) + 1.0;
            CHECK(std::abs(jd.df_plus.at(site) - fd_p) < 2e-6 * scale);
            CHECK(std::abs(jd.df_minus.at(site) - fd_m) < 2e-6 * scale);
        }
    }
}

TEST_CASE("zero-energy solutions: explicit single-site values and pairing identity") {
    Window w = Window::symmetric(12);
    ZeroEnergyJost z0 = zero_energy_jost(Potential::zero(), w);
    for (int n = w.n_min; n <= w.n_max; ++n) {
        CHECK(z0.psi_plus.at(n) == 1.0);
        CHECK(z0.psi_minus.at(n) == 1.0);
    }

    ZeroEnergyJost z = zero_energy_jost(Potential::single_site(0, -1.5), w);
    for (int n = 0; n <= 12; ++n) CHECK(z.psi_plus.at(n) == doctest::Approx(1.0).epsilon(1e-14));
    for (int n = -12; n <= 0; ++n)
        CHECK(z.psi_plus.at(n) == doctest::Approx(1.0 + 1.5 * n).epsilon(1e-13));
    CHECK(z.v_dot_psi_plus == doctest::Approx(-1.5).epsilon(1e-14));

    SplitMix64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        Potential V = random_compact_potential(rng);
        ZeroEnergyJost zr = zero_energy_jost(V, w);
        CHECK(std::abs(zr.v_dot_psi_plus - zr.v_dot_psi_minus) <
              1e-12 * (1.0 + std::abs(zr.v_dot_psi_plus)));
        // psi± solve the zero-energy recurrence
        RealSequence hp = apply_h(V, zr.psi_plus);
        for (int n = w.n_min + 1; n < w.n_max; ++n) CHECK(std::abs(hp.at(n)) < 1e-11);
    }
}

TEST_CASE("zero-energy Wronskian equals <V, psi->") {
    SplitMix64 rng(43);
    Window w = Window::symmetric(14);
    for (int trial = 0; trial < 50; ++trial) {
        Potential V = random_compact_potential(rng);
        ZeroEnergyJost z = zero_energy_jost(V, w);
        int s = V.support_max();
        double w0 = z.psi_plus.at(s) * z.psi_minus.at(s + 1) - z.psi_plus.at(s + 1) * z.psi_minus.at(s);
        CHECK(std::abs(w0 - z.v_dot_psi_minus) < 1e-10 * (1.0 + std::abs(w0)));
        // and is site-independent
        for (int n = w.n_min; n < w.n_max; ++n) {
            double wn = z.psi_plus.at(n) * z.psi_minus.at(n + 1) - z.psi_plus.at(n + 1) * z.psi_minus.at(n);
            CHECK(std::abs(wn - w0) < 1e-10 * (1.0 + std::abs(w0)));
        }
    }
}

TEST_CASE("scattering coefficients: free case and the representation identity") {
    Window w = Window::symmetric(30);
    // V = 0: psi- = psi+(-theta), so the formulas give a = 0, b = 1
    ScatteringData free = scattering_coeffs(Potential::zero(), -1.1, w);
    CHECK(std::abs(free.a) < 1e-13);
    CHECK(std::abs(free.b - 1.0) < 1e-13);

    SplitMix64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        Potential V = random_compact_potential(rng);
        double theta = -rng.uniform(0.1, M_PI - 0.1);
        ScatteringData sc = scattering_coeffs(V, theta, w);
        double omega = 2.0 - 2.0 * std::cos(theta);
        JostData jp = jost_pair(V, resolve_branch(omega, Side::plus), w);
        JostData jm = jost_pair(V, resolve_branch(omega, Side::minus), w);
        double scale = 1.0 + std::abs(sc.a) + std::abs(sc.b);
        for (int n = w.n_min; n <= w.n_max; ++n) {
            Complex resid = jp.psi_minus.at(n) - sc.a * jp.psi_plus.at(n) - sc.b * jm.psi_plus.at(n);
            CHECK(std::abs(resid) < 1e-10 * scale);
        }
    }
}

TEST_CASE("scattering coefficients agree with a least-squares fit on the free region") {
    // dual-method oracle: fit psi-(theta) against {psi+(theta), psi+(-theta)}
    // over sites beyond the support, where all three solve the free recurrence
    Window w = Window::symmetric(30);
    Potential V = Potential::single_site(0, -1.5);
    for (double theta : {-M_PI / 2, -0.6, -2.3}) {
        double omega = 2.0 - 2.0 * std::cos(theta);
        JostData jp = jost_pair(V, resolve_branch(omega, Side::plus), w);
        JostData jm = jost_pair(V, resolve_branch(omega, Side::minus), w);
        // 2x2 normal equations over n in [5, 25]
        Complex g11{}, g12{}, g22{}, r1{}, r2{};
        for (int n = 5; n <= 25; ++n) {
            Complex b1 = jp.psi_plus.at(n), b2 = jm.psi_plus.at(n), y = jp.psi_minus.at(n);
            g11 += std::conj(b1) * b1;
            g12 += std::conj(b1) * b2;
            g22 += std::conj(b2) * b2;
            r1 += std::conj(b1) * y;
            r2 += std::conj(b2) * y;
        }
        Complex det = g11 * g22 - g12 * std::conj(g12);
        Complex a_fit = (g22 * r1 - g12 * r2) / det;
        Complex b_fit = (g11 * r2 - std::conj(g12) * r1) / det;
        ScatteringData sc = scattering_coeffs(V, theta, w);
        CHECK(std::abs(sc.a - a_fit) < 1e-10 * (1.0 + std::abs(sc.a)));
        CHECK(std::abs(sc.b - b_fit) < 1e-10 * (1.0 + std::abs(sc.b)));
    }
    CHECK_THROWS_AS(scattering_coeffs(V, 0.0, w), std::domain_error);
}

TEST_CASE("genericity: resonant and generic examples") {
    GenericityResult free = is_generic(Potential::zero());
    CHECK_FALSE(free.generic);
    CHECK(free.w0 == 0.0);

    GenericityResult single = is_generic(Potential::single_site(0, -1.5));
    CHECK(single.generic);
    CHECK(single.w0 == doctest::Approx(-1.5).epsilon(1e-13));
    CHECK(single.v_pairing == doctest::Approx(single.w0).epsilon(1e-12));

    // two-site resonance: tune v so that <V, psi+(0)> = 0 (root found by bisection)
    auto pairing = [](double v) {
        Window w = Window::symmetric(10);
        return zero_energy_jost(Potential(0, {v, v}), w).v_dot_psi_plus;
    };
    double v_res = oracle::bisect(pairing, -3.0, -1.0);
    CHECK(v_res == doctest::Approx(-2.0).epsilon(1e-10));
    GenericityResult res = is_generic(Potential(0, {v_res, v_res}));
    CHECK_FALSE(res.generic);
}

TEST_CASE("jost: f+ and its derivative stay bounded and continuous near theta = 0") {
    Window w = Window::symmetric(30);
    SplitMix64 rng(53);
    for (int trial = 0; trial < 8; ++trial) {
        Potential V = random_compact_potential(rng);
        double prev_f = 0.0, prev_df = 0.0;
        bool first = true;
        for (double th = -M_PI / 4; th <= -1e-3 + 1e-12; th += (M_PI / 4 - 1e-3) / 60.0) {
            JostData jd = jost_pair(V, resolve_branch(2.0 - 2.0 * std::cos(th), Side::plus), w);
            double nf = 0.0, ndf = 0.0;
            for (int n = 0; n <= w.n_max; ++n) {
                nf = std::max(nf, std::abs(jd.f_plus.at(n)));
                ndf = std::max(ndf, std::abs(jd.df_plus.at(n)));
            }
            CHECK(std::isfinite(nf));
            CHECK(std::isfinite(ndf));
            if (!first) {
                CHECK(std::abs(nf - prev_f) < 0.7 * (1.0 + std::max(nf, prev_f)));
                CHECK(std::abs(ndf - prev_df) < 0.7 * (1.0 + std::max(ndf, prev_df)));
            }
            prev_f = nf;
            prev_df = ndf;
            first = false;
        }
    }
}
