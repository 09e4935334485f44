#include "dsch/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "dsch/linalg.hpp"

namespace dsch {

double lattice_weight(int n, double s) {
    double n2 = static_cast<double>(n) * static_cast<double>(n);
    return std::pow(1.0 + n2, 0.5 * s);
}

Potential::Potential(int offset, std::vector<double> values) : offset_(offset), values_(std::move(values)) {
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("Potential: entries must be finite");
    // trim leading/trailing exact zeros so support_min/max are sharp
    size_t lo = 0, hi = values_.size();
    while (lo < hi && values_[lo] == 0.0) ++lo;
    while (hi > lo && values_[hi - 1] == 0.0) --hi;
    offset_ += static_cast<int>(lo);
    values_ = std::vector<double>(values_.begin() + static_cast<long>(lo), values_.begin() + static_cast<long>(hi));
}

double Potential::l1_norm(double s) const {
    linalg::Accumulator acc;
    for (size_t i = 0; i < values_.size(); ++i)
        acc.add(lattice_weight(offset_ + static_cast<int>(i), s) * std::abs(values_[i]));
    return acc.value();
}

double Potential::l2_norm(double sigma) const {
    linalg::Accumulator acc;
    for (size_t i = 0; i < values_.size(); ++i) {
        double w = lattice_weight(offset_ + static_cast<int>(i), 2.0 * sigma);
        acc.add(w * values_[i] * values_[i]);
    }
    return std::sqrt(acc.value());
}

double Potential::linf_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

Potential Potential::reflected() const {
    std::vector<double> neg(values_.size());
    for (size_t i = 0; i < values_.size(); ++i) neg[i] = -values_[i];
    return Potential(offset_, std::move(neg));
}

Sequence to_complex(const RealSequence& u) {
    Sequence out(u.window);
    for (size_t i = 0; i < u.v.size(); ++i) out.v[i] = u.v[i];
    return out;
}

RealSequence real_part(const Sequence& u) {
    RealSequence out(u.window);
    for (size_t i = 0; i < u.v.size(); ++i) out.v[i] = u.v[i].real();
    return out;
}

Sequence alternate_signs(const Sequence& u) {
    Sequence out(u.window);
    for (int n = u.window.n_min; n <= u.window.n_max; ++n)
        out.ref(n) = ((n & 1) ? -1.0 : 1.0) * u.at(n);
    return out;
}

Kernel Kernel::identity(Window w) {
    Kernel K(w);
    for (int n = w.n_min; n <= w.n_max; ++n) K.at(n, n) = 1.0;
    return K;
}

Sequence Kernel::apply(const Sequence& u) const {
    if (!(u.window == window)) throw std::invalid_argument("Kernel::apply: window mismatch");
    const int sz = window.size();
    Sequence out(window);
    for (int i = 0; i < sz; ++i) {
        Complex s{};
        const Complex* row = &a[static_cast<size_t>(i) * sz];
        for (int j = 0; j < sz; ++j) s += row[j] * u.v[static_cast<size_t>(j)];
        out.v[static_cast<size_t>(i)] = s;
    }
    return out;
}

Kernel Kernel::transpose() const {
    Kernel out(window);
    const int sz = window.size();
    for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j)
            out.a[static_cast<size_t>(j) * sz + i] = a[static_cast<size_t>(i) * sz + j];
    return out;
}

Kernel Kernel::conj() const {
    Kernel out(window);
    for (size_t i = 0; i < a.size(); ++i) out.a[i] = std::conj(a[i]);
    return out;
}

double max_abs_entry(const Kernel& K) {
    double m = 0.0;
    for (const Complex& c : K.a) m = std::max(m, std::abs(c));
    return m;
}

double max_abs_diff(const Kernel& A, const Kernel& B) {
    if (!(A.window == B.window)) throw std::invalid_argument("max_abs_diff: window mismatch");
    double m = 0.0;
    for (size_t i = 0; i < A.a.size(); ++i) m = std::max(m, std::abs(A.a[i] - B.a[i]));
    return m;
}

namespace {

template <typename T>
GridSeq<T> apply_h_impl(const Potential& V, const GridSeq<T>& u) {
    if (!V.empty() && !(u.window.contains(V.support_min()) && u.window.contains(V.support_max())))
        throw std::invalid_argument("apply_h: window does not contain the support of V");
    GridSeq<T> out(u.window);
    const int lo = u.window.n_min, hi = u.window.n_max;
    for (int n = lo; n <= hi; ++n) {
        T up = (n + 1 <= hi) ? u.at(n + 1) : T{};
        T dn = (n - 1 >= lo) ? u.at(n - 1) : T{};
        out.ref(n) = -(up + dn - 2.0 * u.at(n)) + V(n) * u.at(n);
    }
    return out;
}

}  // namespace

Sequence apply_h(const Potential& V, const Sequence& u) { return apply_h_impl(V, u); }
RealSequence apply_h(const Potential& V, const RealSequence& u) { return apply_h_impl(V, u); }

namespace {

template <typename T>
double weighted_norm_impl(const GridSeq<T>& u, double sigma, SeqNorm kind) {
    switch (kind) {
        case SeqNorm::l2_sigma: {
            linalg::Accumulator acc;
            for (int n = u.window.n_min; n <= u.window.n_max; ++n)
                acc.add(lattice_weight(n, 2.0 * sigma) * std::norm(Complex(u.at(n))));
            return std::sqrt(acc.value());
        }
        case SeqNorm::l1_sigma: {
            linalg::Accumulator acc;
            for (int n = u.window.n_min; n <= u.window.n_max; ++n)
                acc.add(lattice_weight(n, sigma) * std::abs(Complex(u.at(n))));
            return acc.value();
        }
        case SeqNorm::linf: {
            double m = 0.0;
            for (int n = u.window.n_min; n <= u.window.n_max; ++n)
                m = std::max(m, std::abs(Complex(u.at(n))));
            return m;
        }
    }
    return 0.0;
}

}  // namespace

double weighted_norm(const Sequence& u, double sigma, SeqNorm kind) { return weighted_norm_impl(u, sigma, kind); }
double weighted_norm(const RealSequence& u, double sigma, SeqNorm kind) { return weighted_norm_impl(u, sigma, kind); }

double kernel_norm(const Kernel& K, KernelNorm kind, double sigma) {
    const int sz = K.window.size();
    switch (kind) {
        case KernelNorm::b1_inf:
            return max_abs_entry(K);
        case KernelNorm::b_sigma: {
            std::vector<double> w(static_cast<size_t>(sz));
            for (int i = 0; i < sz; ++i) w[static_cast<size_t>(i)] = lattice_weight(K.window.site(i), -sigma);
            return linalg::largest_singular_value_scaled(K.a, sz, w, w);
        }
        case KernelNorm::frobenius: {
            linalg::Accumulator acc;
            for (int i = 0; i < sz; ++i) {
                double wi = lattice_weight(K.window.site(i), -sigma);
                const Complex* row = &K.a[static_cast<size_t>(i) * sz];
                for (int j = 0; j < sz; ++j) {
                    double wj = lattice_weight(K.window.site(j), -sigma);
                    acc.add(std::norm(wi * wj * row[j]));
                }
            }
            return std::sqrt(acc.value());
        }
    }
    return 0.0;
}

}  // namespace dsch
