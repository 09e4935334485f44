#include "dsch/oscillatory.hpp"

#include <algorithm>
#include <cmath>

#include "dsch/linalg.hpp"

namespace dsch {

namespace {

// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1] by Newton
// iteration on P_n (standard gauleg construction).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(n - 1 - i)] = z;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<size_t>(n - 1 - i)] = w[static_cast<size_t>(i)];
    }
}

struct Rule16 {
    std::vector<double> x, w;
    Rule16() { gauss_legendre(16, x, w); }
};
const Rule16& rule16() {
    static const Rule16 r;
    return r;
}

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = std::exp(-1.0 / x);
    double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

// One sweep over [lo,hi] with `panels` total Gauss panels distributed over the
// seed intervals; deterministic left-to-right accumulation.
Complex sweep(double t, const PhaseSpec& phase, const std::function<double(double)>& g,
              const std::vector<double>& pts, int panels) {
    const auto& r = rule16();
    double total = pts.back() - pts.front();
    linalg::Accumulator re, im;
    for (size_t s = 0; s + 1 < pts.size(); ++s) {
        double a0 = pts[s], b0 = pts[s + 1];
        int np = std::max(1, static_cast<int>(std::lround(panels * (b0 - a0) / total)));
        double hp = (b0 - a0) / np;
        for (int p = 0; p < np; ++p) {
            double c = a0 + (p + 0.5) * hp;
            double half = 0.5 * hp;
            for (int q = 0; q < 16; ++q) {
                double th = c + half * r.x[static_cast<size_t>(q)];
                double gv = g(th);
                if (gv == 0.0) continue;
                double ph = t * phase.phase(th);
                double wq = half * r.w[static_cast<size_t>(q)] * gv;
                re.add(wq * std::cos(ph));
                im.add(wq * std::sin(ph));
            }
        }
    }
    return {re.value(), im.value()};
}

}  // namespace

const std::vector<double>& gauss_nodes16() { return rule16().x; }
const std::vector<double>& gauss_weights16() { return rule16().w; }

std::vector<double> PhaseSpec::panel_seeds(double lo, double hi) const {
    std::vector<double> seeds;
    auto push = [&](double th) {
        if (th > lo + 1e-12 && th < hi - 1e-12) seeds.push_back(th);
    };
    if (std::abs(a) <= 2.0) {
        double base = std::asin(std::clamp(a / 2.0, -1.0, 1.0));  // 2 sin(theta) = a
        // all representatives of the two solution families within [-pi, pi]
        push(base);
        push(M_PI - base);
        push(-M_PI - base);
    }
    push(M_PI / 2.0);
    push(-M_PI / 2.0);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-10; }),
                seeds.end());
    return seeds;
}

CutoffPair build_cutoffs(double theta0) {
    if (!(theta0 > 0.0)) throw std::invalid_argument("build_cutoffs: theta0 must be positive");
    CutoffPair out;
    out.clamped = theta0 > M_PI / 4.0;
    out.theta0 = out.clamped ? M_PI / 4.0 : theta0;
    return out;
}

OmegaCutoffPair build_omega_cutoffs() { return OmegaCutoffPair{}; }

double OmegaCutoffPair::chi1(double omega) const {
    if (omega <= 1.0) return 1.0;
    if (omega >= 3.0) return 0.0;
    return 1.0 - smoothstep(0.5 * (omega - 1.0));
}

double CutoffPair::chi0(double th) const {
    double y = std::abs(th);
    if (y > M_PI) y = M_PI;  // even, 2pi-periodic use is confined to [-pi, pi]
    double half = 0.5 * theta0;
    if (y <= half) return 1.0;
    if (y < theta0) return 1.0 - smoothstep((y - half) / half);
    if (y <= M_PI - theta0) return 0.0;
    if (y < M_PI - half) return smoothstep((y - (M_PI - theta0)) / half);
    return 1.0;
}

QuadResult oscillatory_integral(double t, const PhaseSpec& phase, const std::function<double(double)>& g,
                                double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("oscillatory_integral: empty interval");
    std::vector<double> pts{lo};
    for (double s : phase.panel_seeds(lo, hi)) pts.push_back(s);
    pts.push_back(hi);

    int panels = std::max(64, static_cast<int>(std::ceil(8.0 * t)));
    QuadResult out;
    Complex prev = sweep(t, phase, g, pts, panels);
    for (int dbl = 0; dbl < 4; ++dbl) {
        panels *= 2;
        Complex cur = sweep(t, phase, g, pts, panels);
        double diff = std::abs(cur - prev);
        out.value = cur;
        out.err_estimate = diff;
        out.panels = panels;
        if (diff <= std::max(1e-12, 1e-9 * std::abs(cur))) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    out.converged = false;
    return out;
}

std::vector<double> make_a_grid(double lo, double hi, double step) {
    std::vector<double> g;
    int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
    g.reserve(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
    return g;
}

namespace {

// |I(a)| for every a in one pass: nodes are shared, the e^{-i t a theta} factor
// advances by a geometric recurrence along the (uniform) a-grid.
void sup_pass(double t, const std::function<double(double)>& g, std::span<const double> a_grid, int panels,
              std::vector<Complex>& acc) {
    const auto& r = rule16();
    acc.assign(a_grid.size(), Complex{});
    const double lo = -M_PI, hi = M_PI;
    const double a0 = a_grid[0];
    const double astep = a_grid.size() > 1 ? a_grid[1] - a_grid[0] : 0.0;
    // mandatory breakpoints at the band edges and the degenerate points
    const double pts[5] = {lo, -M_PI / 2.0, 0.0, M_PI / 2.0, hi};
    for (int s = 0; s < 4; ++s) {
        int np = std::max(1, panels / 4);
        double hp = (pts[s + 1] - pts[s]) / np;
        for (int p = 0; p < np; ++p) {
            double c = pts[s] + (p + 0.5) * hp;
            double half = 0.5 * hp;
            for (int q = 0; q < 16; ++q) {
                double th = c + half * r.x[static_cast<size_t>(q)];
                double gv = g(th);
                if (gv == 0.0) continue;
                double base_ph = t * (2.0 - 2.0 * std::cos(th));
                double wq = half * r.w[static_cast<size_t>(q)] * gv;
                Complex cq = wq * Complex(std::cos(base_ph), std::sin(base_ph));
                Complex f = Complex(std::cos(t * a0 * th), -std::sin(t * a0 * th));
                Complex z = Complex(std::cos(t * astep * th), -std::sin(t * astep * th));
                for (size_t j = 0; j < a_grid.size(); ++j) {
                    acc[j] += cq * f;
                    f *= z;
                }
            }
        }
    }
}

}  // namespace

SupOverAResult sup_over_a_table(double t, const std::function<double(double)>& g, std::span<const double> a_grid,
                                std::vector<double>& abs_values) {
    if (a_grid.empty()) throw std::invalid_argument("sup_over_a: empty grid");
    for (size_t j = 1; j < a_grid.size(); ++j)
        if (std::abs((a_grid[j] - a_grid[j - 1]) - (a_grid[1] - a_grid[0])) > 1e-9)
            throw std::invalid_argument("sup_over_a: grid must be uniform");

    int panels = std::max(64, static_cast<int>(std::ceil(2.0 * t)));
    std::vector<Complex> coarse, fine;
    sup_pass(t, g, a_grid, panels, coarse);
    sup_pass(t, g, a_grid, 2 * panels, fine);

    SupOverAResult out;
    double max_diff = 0.0;
    abs_values.resize(a_grid.size());
    for (size_t j = 0; j < a_grid.size(); ++j) {
        abs_values[j] = std::abs(fine[j]);
        max_diff = std::max(max_diff, std::abs(fine[j] - coarse[j]));
        if (abs_values[j] > out.sup) {
            out.sup = abs_values[j];
            out.a_at_sup = a_grid[j];
        }
    }
    out.err_estimate = max_diff;
    out.converged = max_diff <= std::max(1e-10, 1e-7 * out.sup);
    return out;
}

SupOverAResult sup_over_a_decay(double t, const std::function<double(double)>& g, std::span<const double> a_grid) {
    std::vector<double> tmp;
    return sup_over_a_table(t, g, a_grid, tmp);
}

}  // namespace dsch
