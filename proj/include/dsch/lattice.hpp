// lattice.hpp — sequences on a finite window of Z, the operator H = -Δ + V,
// weighted norms, and dense kernels over the window.

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace dsch {

using Complex = std::complex<double>;

// (1 + n^2)^{s/2}
double lattice_weight(int n, double s);

// Contiguous index range [n_min, n_max] of the integer lattice.
struct Window {
    int n_min = 0;
    int n_max = 0;

    static Window symmetric(int half_width) {
        if (half_width < 1) throw std::invalid_argument("Window: half_width must be >= 1");
        return {-half_width, half_width};
    }

    int size() const { return n_max - n_min + 1; }
    bool contains(int n) const { return n >= n_min && n <= n_max; }
    int index(int n) const { return n - n_min; }
    int site(int idx) const { return n_min + idx; }
    bool operator==(const Window&) const = default;
};

// Real potential with compact support. Entries outside
// [offset, offset + values.size() - 1] are exactly zero.
class Potential {
public:
    Potential() = default;
    Potential(int offset, std::vector<double> values);

    static Potential zero() { return Potential(); }
    static Potential single_site(int n, double v) { return Potential(n, {v}); }

    double operator()(int n) const {
        if (empty()) return 0.0;
        int i = n - offset_;
        return (i >= 0 && i < static_cast<int>(values_.size())) ? values_[static_cast<size_t>(i)] : 0.0;
    }

    bool empty() const { return values_.empty(); }
    int support_min() const { return offset_; }
    int support_max() const { return offset_ + static_cast<int>(values_.size()) - 1; }
    int offset() const { return offset_; }
    const std::vector<double>& values() const { return values_; }

    // Sum_n (1+n^2)^{s/2} |V_n|
    double l1_norm(double s) const;
    // sqrt(Sum_n (1+n^2)^sigma V_n^2)
    double l2_norm(double sigma) const;
    double linf_norm() const;

    // Potential of the reflected operator J H(V) J = 4 - H(-V), J u_n = (-1)^n u_n.
    // Maps the spectral edge omega = 4 of H(V) to the edge 0 of H(-V).
    Potential reflected() const;

private:
    int offset_ = 0;
    std::vector<double> values_;  // trimmed: first and last entries nonzero
};

// Sequence over a window, dense storage.
template <typename T>
struct GridSeq {
    Window window;
    std::vector<T> v;

    GridSeq() = default;
    explicit GridSeq(Window w) : window(w), v(static_cast<size_t>(w.size()), T{}) {}

    T at(int n) const { return window.contains(n) ? v[static_cast<size_t>(window.index(n))] : T{}; }
    T& ref(int n) { return v[static_cast<size_t>(window.index(n))]; }
    int size() const { return window.size(); }
};

using Sequence = GridSeq<Complex>;
using RealSequence = GridSeq<double>;

Sequence to_complex(const RealSequence& u);
RealSequence real_part(const Sequence& u);

// Sequence (-1)^n u_n (the n -> (-1)^n conjugation used at the omega = 4 edge).
Sequence alternate_signs(const Sequence& u);

// Dense complex matrix K_{n,m} over window x window, row index n, column index m.
struct Kernel {
    Window window;
    std::vector<Complex> a;  // row-major, size window.size()^2

    Kernel() = default;
    explicit Kernel(Window w)
        : window(w), a(static_cast<size_t>(w.size()) * static_cast<size_t>(w.size()), Complex{}) {}

    static Kernel identity(Window w);

    Complex& at(int n, int m) {
        return a[static_cast<size_t>(window.index(n)) * static_cast<size_t>(window.size()) +
                 static_cast<size_t>(window.index(m))];
    }
    Complex at(int n, int m) const {
        return a[static_cast<size_t>(window.index(n)) * static_cast<size_t>(window.size()) +
                 static_cast<size_t>(window.index(m))];
    }

    Sequence apply(const Sequence& u) const;
    Kernel transpose() const;
    Kernel conj() const;
};

// Largest absolute entry, max_{n,m} |K_{n,m}| = ||K||_{l^1 -> l^inf}.
double max_abs_entry(const Kernel& K);

// Entrywise max |A - B|.
double max_abs_diff(const Kernel& A, const Kernel& B);

// (H u)_n = -(u_{n+1} + u_{n-1} - 2 u_n) + V_n u_n with Dirichlet truncation
// (entries outside the window are treated as zero). The window must contain
// the support of V.
Sequence apply_h(const Potential& V, const Sequence& u);
RealSequence apply_h(const Potential& V, const RealSequence& u);

enum class SeqNorm { l2_sigma, l1_sigma, linf };

// Weighted sequence norms:
//   l2_sigma:  sqrt(Sum (1+n^2)^sigma |u_n|^2)
//   l1_sigma:  Sum (1+n^2)^{sigma/2} |u_n|
//   linf:      max |u_n|
// sigma < 0 is allowed (dual weights).
double weighted_norm(const Sequence& u, double sigma, SeqNorm kind);
double weighted_norm(const RealSequence& u, double sigma, SeqNorm kind);

enum class KernelNorm {
    b_sigma,    // operator norm l^2_sigma -> l^2_{-sigma}: largest singular value of D_{-sigma} K D_{-sigma}
    b1_inf,     // operator norm l^1 -> l^inf: max |K_{n,m}|
    frobenius,  // Hilbert-Schmidt norm of D_{-sigma} K D_{-sigma}
};

double kernel_norm(const Kernel& K, KernelNorm kind, double sigma = 0.0);

}  // namespace dsch
