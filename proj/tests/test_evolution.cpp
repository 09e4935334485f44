#include <doctest.h>

#include "dsch/evolution.hpp"
#include "dsch/ensemble.hpp"
#include "dsch/jost.hpp"
#include "oracles.hpp"

using namespace dsch;

TEST_CASE("free propagator: t = 0 is the identity") {
    Window w = Window::symmetric(40);
    EvolutionKernel ek = evolve_free_kernel(0.0, w);
    CHECK(ek.converged);
    CHECK(max_abs_diff(ek.kernel, Kernel::identity(w)) < 1e-13);
}

TEST_CASE("free propagator matches the Bessel closed form e^{2it} (-i)^d J_d(2t)") {
    double t = 10.0;
    Window w = Window::symmetric(60);
    EvolutionKernel ek = evolve_free_kernel(t, w);
    REQUIRE(ek.converged);
    auto J = oracle::bessel_j_row(120, 2.0 * t);
    Complex e2it = std::polar(1.0, 2.0 * t);
    for (int n = -60; n <= 60; n += 3)
        for (int m = -60; m <= 60; m += 7) {
            int d = std::abs(n - m);
            Complex expect = e2it * std::pow(Complex(0, -1), d) * J[static_cast<size_t>(d)];
            CHECK(std::abs(ek.kernel.at(n, m) - expect) < 1e-10);
        }
}

TEST_CASE("free propagator: interior columns have unit l2 norm") {
    double t = 7.0;
    Window w = Window::symmetric(120);
    EvolutionKernel ek = evolve_free_kernel(t, w);
    for (int m : {-40, 0, 17}) {
        double nrm = 0.0;
        for (int n = w.n_min; n <= w.n_max; ++n) nrm += std::norm(ek.kernel.at(n, m));
        CHECK(std::abs(std::sqrt(nrm) - 1.0) < 1e-9);
    }
}

TEST_CASE("evolve_ac_kernel: V = 0 falls through to the free propagator, resonant V rejected") {
    Window w = Window::symmetric(50);
    EvolutionKernel ac = evolve_ac_kernel(Potential::zero(), 5.0, w);
    EvolutionKernel fr = evolve_free_kernel(5.0, w);
    CHECK(max_abs_diff(ac.kernel, fr.kernel) < 1e-9);
    CHECK_THROWS_AS(evolve_ac_kernel(Potential(0, {-2.0, -2.0}), 1.0, w), std::domain_error);
    CHECK_THROWS_AS(spectral_filter_kernel(Potential(0, {-2.0, -2.0}), 1.0, w, [](double) { return 1.0; }),
                    std::domain_error);
}

TEST_CASE("evolve_ac_kernel: V = -1.5 delta_0 matches the eigendecomposition oracle") {
    Potential V = Potential::single_site(0, -1.5);
    Eigensystem es = full_eigensystem(V, Window::symmetric(200));
    Window obs = Window::symmetric(100);
    for (double t : {2.0, 5.0, 10.0}) {
        EvolutionKernel ek = evolve_ac_kernel(V, t, obs);
        REQUIRE(ek.converged);
        Kernel oracle_kernel = evolve_oracle_kernel(es, t);
        double worst = 0.0;
        for (int n = obs.n_min; n <= obs.n_max; ++n)
            for (int m = obs.n_min; m <= obs.n_max; ++m)
                worst = std::max(worst, std::abs(ek.kernel.at(n, m) - oracle_kernel.at(n, m)));
        CHECK(worst < 1e-6);
        // symmetry of the assembled kernel
        double asym = 0.0;
        for (int n = obs.n_min; n <= obs.n_max; n += 3)
            for (int m = obs.n_min; m <= obs.n_max; m += 5)
                asym = std::max(asym, std::abs(ek.kernel.at(n, m) - ek.kernel.at(m, n)));
        CHECK(asym < 1e-10);
    }
}

TEST_CASE("evolve_ac_kernel on a random generic potential vs oracle") {
    SplitMix64 rng(127);
    Potential V;
    do {
        V = random_compact_potential(rng, 5, 0.9);
    } while (!is_generic(V).generic);
    Eigensystem es = full_eigensystem(V, Window::symmetric(220));
    Window obs = Window::symmetric(80);
    EvolutionKernel ek = evolve_ac_kernel(V, 6.0, obs);
    Kernel ora = evolve_oracle_kernel(es, 6.0);
    double worst = 0.0;
    for (int n = obs.n_min; n <= obs.n_max; ++n)
        for (int m = obs.n_min; m <= obs.n_max; ++m)
            worst = std::max(worst, std::abs(ek.kernel.at(n, m) - ora.at(n, m)));
    CHECK(worst < 1e-6);
}

TEST_CASE("unitarity: a.c. part plus restored bound states has unit columns") {
    Potential V = Potential::single_site(0, -1.5);
    Window w = Window::symmetric(150);
    double t = 5.0;
    EvolutionKernel ek = evolve_ac_kernel(V, t, w);
    SpectralDecomposition sd = discrete_spectrum(V, w);
    REQUIRE(sd.pairs.size() == 1);
    Kernel full = ek.kernel;
    const int sz = w.size();
    Complex ph = std::polar(1.0, t * sd.pairs[0].omega);
    for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j)
            full.a[static_cast<size_t>(i) * sz + j] +=
                ph * sd.pairs[0].vector.v[static_cast<size_t>(i)] * sd.pairs[0].vector.v[static_cast<size_t>(j)];
    for (int m : {-30, 0, 11}) {
        double nrm = 0.0;
        for (int n = w.n_min; n <= w.n_max; ++n) nrm += std::norm(full.at(n, m));
        CHECK(std::abs(std::sqrt(nrm) - 1.0) < 1e-8);
    }
}

TEST_CASE("P_ac compatibility: the theta-integral at t = 0 equals I - sum of bound projections") {
    Potential V = Potential::single_site(0, -1.5);
    Window w = Window::symmetric(150);
    EvolutionKernel ek = evolve_ac_kernel(V, 0.0, w);
    SpectralDecomposition sd = discrete_spectrum(V, w);
    CHECK(max_abs_diff(ek.kernel, sd.p_ac) < 1e-8);
}

TEST_CASE("group law and energy conservation on the oracle route") {
    Potential V = Potential::single_site(0, -1.5);
    Window w = Window::symmetric(80);
    Eigensystem es = full_eigensystem(V, w);
    Kernel U1 = evolve_oracle_kernel(es, 3.0);
    Kernel U2 = evolve_oracle_kernel(es, 4.5);
    Kernel U12 = evolve_oracle_kernel(es, 7.5);
    const int sz = w.size();
    double worst = 0.0;
    for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j) {
            Complex s{};
            for (int k = 0; k < sz; ++k)
                s += U1.a[static_cast<size_t>(i) * sz + k] * U2.a[static_cast<size_t>(k) * sz + j];
            worst = std::max(worst, std::abs(s - U12.a[static_cast<size_t>(i) * sz + j]));
        }
    CHECK(worst < 1e-8);

    // energy <u(t), H u(t)> constant along the evolution
    Sequence u0(w);
    SplitMix64 rng(131);
    for (int n = -10; n <= 10; ++n) u0.ref(n) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    auto energy = [&](const Sequence& u) {
        Sequence hu = apply_h(V, u);
        Complex e{};
        for (int n = w.n_min; n <= w.n_max; ++n) e += std::conj(u.at(n)) * hu.at(n);
        return e.real();
    };
    double e0 = energy(u0);
    for (double t : {2.0, 9.0}) {
        Kernel U = evolve_oracle_kernel(es, t);
        // restore bound states so U is the full unitary group
        SpectralDecomposition sd = discrete_spectrum(V, w);
        for (const auto& p : sd.pairs) {
            Complex ph = std::polar(1.0, t * p.omega);
            for (int i = 0; i < sz; ++i)
                for (int j = 0; j < sz; ++j)
                    U.a[static_cast<size_t>(i) * sz + j] +=
                        ph * p.vector.v[static_cast<size_t>(i)] * p.vector.v[static_cast<size_t>(j)];
        }
        Sequence ut = U.apply(u0);
        CHECK(std::abs(energy(ut) - e0) < 1e-8 * std::max(1.0, std::abs(e0)));
    }
}

TEST_CASE("decay_series: input validation") {
    Potential V = Potential::single_site(0, -1.5);
    CHECK_THROWS_AS(decay_series(V, 3.0, {10.0, 100.0}, NormKind::l1_inf, 120), std::invalid_argument);
    CHECK_THROWS_AS(decay_series(V, 1.0, {10.0, 20.0}, NormKind::weighted, 200), std::invalid_argument);
    CHECK_THROWS_AS(decay_series(V, 3.0, {20.0, 10.0}, NormKind::l1_inf, 200), std::invalid_argument);
    CHECK_THROWS_AS(decay_series(Potential(0, {-2.0, -2.0}), 3.0, {10.0}, NormKind::l1_inf, 200),
                    std::domain_error);
}

TEST_CASE("decay_series smoke: norms decay and the free l1->linf sup sits on the caustic") {
    std::vector<double> times = {20.0, 40.0, 80.0};
    DecaySeries free = decay_series(Potential::zero(), 3.0, times, NormKind::l1_inf, 220,
                                    DecayOptions{.fit_tmin = 10.0});
    CHECK(free.samples.size() == 3);
    CHECK(free.samples[0].norm > free.samples[2].norm);
    CHECK(free.slope < -0.2);
    // sup |J_d(2t)| is attained near d = 2t and scales like the Airy value
    auto J = oracle::bessel_j_row(180, 80.0);  // t = 40
    double sup = 0.0;
    for (double v : J) sup = std::max(sup, std::abs(v));
    CHECK(std::abs(free.samples[1].norm - sup) < 1e-9);
}

TEST_CASE("spectral filter: cut == 1 recovers pi * e^{itH} P_ac") {
    Potential V = Potential::single_site(0, -1.5);
    Window w = Window::symmetric(60);
    double t = 3.0;
    EvolutionKernel full = evolve_ac_kernel(V, t, w);
    EvolutionKernel filt = spectral_filter_kernel(V, t, w, [](double) { return 1.0; });
    double worst = 0.0;
    for (int n = w.n_min; n <= w.n_max; ++n)
        for (int m = w.n_min; m <= w.n_max; ++m)
            worst = std::max(worst, std::abs(filt.kernel.at(n, m) - M_PI * full.kernel.at(n, m)));
    CHECK(worst < 1e-9);
}
