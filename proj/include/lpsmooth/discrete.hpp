#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gsl/gsl_eigen.h>
#include <gsl/gsl_matrix.h>

#include "dyadic.hpp"

namespace lpsmooth {

/// t_{k,m} = 2^{m lambda} 2^{mu k} 2^{-beta (m v k)}.
struct KernelSpec {
    double lambda = 0.5;
    double mu = 0.5;
    double beta = 1.0;

    double entry(int k, int m) const noexcept { return std::exp2(m * lambda + mu * k - beta * std::max(m, k)); }
};

inline constexpr int kKernelGap = 4;
inline constexpr int kOutputPad = 16;

/// b_m = sum_{|k-m| >= 4} t_{k,m} a_k over the input support padded by `pad` indices.
inline WeightedSeq t_apply(const WeightedSeq& a, const KernelSpec& spec, int pad = kOutputPad) {
    WeightedSeq b;
    if (a.empty()) return b;
    for (int m = a.min_index() - pad; m <= a.max_index() + pad; ++m) {
        cplx acc{};
        for (const auto& [k, v] : a.entries)
            if (std::abs(k - m) >= kKernelGap) acc += spec.entry(k, m) * v;
        b.entries[m] = acc;
    }
    return b;
}

/// b_k = 2^{k alpha} a_k.
inline WeightedSeq j_alpha(const WeightedSeq& a, double alpha) {
    WeightedSeq b;
    for (const auto& [k, v] : a.entries) b.entries[k] = std::exp2(k * alpha) * v;
    return b;
}

/// Two-index kernel: product of the one-index kernels of each coordinate.
struct KernelSpec2 {
    KernelSpec first{};
    KernelSpec second{};
    double entry(int k1, int k2, int m1, int m2) const noexcept { return first.entry(k1, m1) * second.entry(k2, m2); }
};

/// Two-index kernel sum. With `restricted`, only pairs with max_j |k_j - m_j| >= 4 contribute.
inline WeightedSeq2 t2_apply(const WeightedSeq2& a, const KernelSpec2& spec, bool restricted, int pad = kOutputPad) {
    WeightedSeq2 b;
    if (a.entries.empty()) return b;
    int lo1 = a.entries.begin()->first.first, hi1 = lo1, lo2 = a.entries.begin()->first.second, hi2 = lo2;
    for (const auto& [idx, v] : a.entries) {
        lo1 = std::min(lo1, idx.first);
        hi1 = std::max(hi1, idx.first);
        lo2 = std::min(lo2, idx.second);
        hi2 = std::max(hi2, idx.second);
    }
    for (int m1 = lo1 - pad; m1 <= hi1 + pad; ++m1)
        for (int m2 = lo2 - pad; m2 <= hi2 + pad; ++m2) {
            cplx acc{};
            for (const auto& [idx, v] : a.entries) {
                if (restricted && std::max(std::abs(idx.first - m1), std::abs(idx.second - m2)) < kKernelGap) continue;
                acc += spec.entry(idx.first, idx.second, m1, m2) * v;
            }
            b.entries[{m1, m2}] = acc;
        }
    return b;
}

enum class KernelPart { full, upper, lower };

inline const char* to_string(KernelPart p) {
    switch (p) {
    case KernelPart::full: return "full";
    case KernelPart::upper: return "k>m";
    case KernelPart::lower: return "k<=m";
    }
    return "?";
}

/// Dense window matrix of the reweighted kernel 2^{m sigma} t_{k,m} 2^{-k nu}: input k in [-K/2, K/2),
/// output m in [-K/2 - pad, K/2 + pad).
struct KernelMatrix {
    int in_lo = 0, in_hi = 0, out_lo = 0, out_hi = 0;
    std::vector<double> data;

    int cols() const noexcept { return in_hi - in_lo; }
    int rows() const noexcept { return out_hi - out_lo; }
    double operator()(int row, int col) const noexcept { return data[static_cast<std::size_t>(row) * cols() + col]; }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(static_cast<std::size_t>(rows()), 0.0);
        for (int r = 0; r < rows(); ++r)
            for (int c = 0; c < cols(); ++c) y[r] += (*this)(r, c) * x[c];
        return y;
    }
    std::vector<double> apply_transpose(const std::vector<double>& y) const {
        std::vector<double> x(static_cast<std::size_t>(cols()), 0.0);
        for (int r = 0; r < rows(); ++r)
            for (int c = 0; c < cols(); ++c) x[c] += (*this)(r, c) * y[r];
        return x;
    }
};

inline KernelMatrix kernel_matrix(const KernelSpec& spec, int K, double sigma = 0.0, double nu = 0.0,
                                  KernelPart part = KernelPart::full, int pad = kOutputPad) {
    if (K < 2 || K % 2 != 0) throw DomainError("window size K must be an even integer >= 2");
    KernelMatrix A;
    A.in_lo = -K / 2;
    A.in_hi = K / 2;
    A.out_lo = A.in_lo - pad;
    A.out_hi = A.in_hi + pad;
    A.data.assign(static_cast<std::size_t>(A.rows()) * A.cols(), 0.0);
    for (int m = A.out_lo; m < A.out_hi; ++m)
        for (int k = A.in_lo; k < A.in_hi; ++k) {
            if (std::abs(k - m) < kKernelGap) continue;
            if (part == KernelPart::upper && !(k > m)) continue;
            if (part == KernelPart::lower && !(k <= m)) continue;
            A.data[static_cast<std::size_t>(m - A.out_lo) * A.cols() + (k - A.in_lo)] =
                std::exp2(m * sigma) * spec.entry(k, m) * std::exp2(-k * nu);
        }
    return A;
}

/// Exact q = 1 norm: largest absolute column sum.
inline double norm_q1(const KernelMatrix& A) {
    double best = 0.0;
    for (int c = 0; c < A.cols(); ++c) {
        double s = 0.0;
        for (int r = 0; r < A.rows(); ++r) s += std::abs(A(r, c));
        best = std::max(best, s);
    }
    return best;
}

/// Exact q = inf norm: largest absolute row sum.
inline double norm_qinf(const KernelMatrix& A) {
    double best = 0.0;
    for (int r = 0; r < A.rows(); ++r) {
        double s = 0.0;
        for (int c = 0; c < A.cols(); ++c) s += std::abs(A(r, c));
        best = std::max(best, s);
    }
    return best;
}

namespace detail {
inline double euclid(const std::vector<double>& v) {
    double a = 0.0;
    for (double x : v) a += x * x;
    return std::sqrt(a);
}
} // namespace detail

/// Lower bound for the q = 2 norm: power iteration on A^T A started from random sign vectors and from every impulse.
inline double norm_q2_probe(const KernelMatrix& A, int random_starts = 8, std::uint64_t seed = 7, int iterations = 500) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin;
    double best = 0.0;
    auto run = [&](std::vector<double> v) {
        double nv = detail::euclid(v), prev = 0.0;
        if (nv == 0.0) return;
        for (auto& x : v) x /= nv;
        for (int it = 0; it < iterations; ++it) {
            const auto av = A.apply(v);
            const double q = detail::euclid(av);
            best = std::max(best, q);
            if (q == 0.0) return;
            auto w = A.apply_transpose(av);
            const double nw = detail::euclid(w);
            for (auto& x : w) x /= nw;
            v = std::move(w);
            if (std::abs(q - prev) <= 1e-13 * q) return;
            prev = q;
        }
    };
    for (int t = 0; t < random_starts; ++t) {
        std::vector<double> v(static_cast<std::size_t>(A.cols()));
        for (auto& x : v) x = coin(rng) ? 1.0 : -1.0;
        run(std::move(v));
    }
    for (int c = 0; c < A.cols(); ++c) {
        std::vector<double> v(static_cast<std::size_t>(A.cols()), 0.0);
        v[c] = 1.0;
        run(std::move(v));
    }
    return best;
}

/// Exact q = 2 norm: square root of the top eigenvalue of A^T A.
inline double norm_q2(const KernelMatrix& A) {
    const auto n = static_cast<std::size_t>(A.cols());
    std::unique_ptr<gsl_matrix, decltype(&gsl_matrix_free)> g(gsl_matrix_calloc(n, n), &gsl_matrix_free);
    for (int i = 0; i < A.cols(); ++i)
        for (int j = i; j < A.cols(); ++j) {
            double acc = 0.0;
            for (int r = 0; r < A.rows(); ++r) acc += A(r, i) * A(r, j);
            gsl_matrix_set(g.get(), static_cast<std::size_t>(i), static_cast<std::size_t>(j), acc);
            gsl_matrix_set(g.get(), static_cast<std::size_t>(j), static_cast<std::size_t>(i), acc);
        }
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> eval(gsl_vector_alloc(n), &gsl_vector_free);
    std::unique_ptr<gsl_eigen_symm_workspace, decltype(&gsl_eigen_symm_free)> ws(gsl_eigen_symm_alloc(n), &gsl_eigen_symm_free);
    if (gsl_eigen_symm(g.get(), eval.get(), ws.get()) != 0) throw DomainError("symmetric eigensolver failed");
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) top = std::max(top, gsl_vector_get(eval.get(), i));
    return std::sqrt(top);
}

inline double window_norm(const KernelMatrix& A, double q) {
    if (q == 1.0) return norm_q1(A);
    if (std::isinf(q)) return norm_qinf(A);
    if (q == 2.0) return norm_q2(A);
    throw DomainError("window norms are implemented for q in {1, 2, inf}");
}

struct ProbeEntry {
    int K = 0;
    double estimate = 0.0;
    /// |estimate - previous| / previous, 0 for the first window.
    double drift = 0.0;
    /// Change of the estimate when the output padding is doubled.
    double padding_error = 0.0;
};

struct ProbeReport {
    KernelSpec spec;
    double q = 2.0;
    double sigma = 0.0, nu = 0.0;
    KernelPart part = KernelPart::full;
    std::vector<ProbeEntry> entries;
    /// Final consecutive drift below the tolerance.
    bool stable = false;
    /// Estimates strictly increasing with K.
    bool monotone_growth = false;
};

/// Empirical l^{q,nu} -> l^{q,sigma} operator norm per window size.
inline ProbeReport bound_probe(const KernelSpec& spec, double q, const std::vector<int>& windows, double sigma = 0.0,
                               double nu = 0.0, KernelPart part = KernelPart::full, double drift_tol = 0.05) {
    if (!(spec.lambda + sigma > 0.0)) throw DomainError("weighted probe needs lambda + sigma > 0");
    if (!(spec.mu - nu > 0.0)) throw DomainError("weighted probe needs mu - nu > 0");
    if (windows.empty()) throw DomainError("bound_probe needs at least one window");
    ProbeReport rep{spec, q, sigma, nu, part, {}, false, false};
    for (int K : windows) {
        ProbeEntry e;
        e.K = K;
        e.estimate = window_norm(kernel_matrix(spec, K, sigma, nu, part), q);
        e.padding_error = std::abs(window_norm(kernel_matrix(spec, K, sigma, nu, part, 2 * kOutputPad), q) - e.estimate);
        if (!rep.entries.empty()) {
            const double prev = rep.entries.back().estimate;
            e.drift = prev > 0.0 ? std::abs(e.estimate - prev) / prev : kInf;
        }
        rep.entries.push_back(e);
    }
    rep.stable = rep.entries.size() >= 2 && rep.entries.back().drift < drift_tol;
    rep.monotone_growth = rep.entries.size() >= 2;
    for (std::size_t i = 1; i < rep.entries.size(); ++i)
        if (!(rep.entries[i].estimate > rep.entries[i - 1].estimate)) rep.monotone_growth = false;
    return rep;
}

/// Half of the q = inf constant: sum_{j >= 4} 2^{-j beta/2} for the symmetric kernel lambda = mu = beta/2.
inline double geometric_half_sum(double beta) {
    const double r = std::exp2(-0.5 * beta);
    return std::pow(r, kKernelGap) / (1.0 - r);
}

} // namespace lpsmooth
