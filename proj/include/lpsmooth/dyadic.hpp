#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace lpsmooth {

/// Radial bump phi(s) = chi(s) - chi(2s), chi the exp(-1/t) smooth step from 1 on (0,1] to 0 on [2, inf).
struct BumpProfile {
    double inner_cutoff = 0.5;
    double outer_cutoff = 2.0;

    static double smooth_edge(double t) noexcept { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

    static double step(double s) noexcept {
        if (s <= 1.0) return 1.0;
        if (s >= 2.0) return 0.0;
        const double a = smooth_edge(2.0 - s);
        const double b = smooth_edge(s - 1.0);
        return a / (a + b);
    }

    double operator()(double s) const noexcept {
        if (!(s > inner_cutoff) || !(s < outer_cutoff)) return 0.0;
        return step(s) - step(2.0 * s);
    }
};

inline BumpProfile make_bump() { return BumpProfile{}; }

struct ShellRange {
    int kmin = 0;
    int kmax = 0;
    int count() const noexcept { return kmax - kmin + 1; }
    bool contains(int k) const noexcept { return k >= kmin && k <= kmax; }
    bool operator==(const ShellRange&) const = default;
};

inline ShellRange parse_shells(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("shells", "expected kmin:kmax, got '" + text + "'");
    try {
        std::size_t used = 0;
        const int lo = std::stoi(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
        const std::string rest = text.substr(colon + 1);
        const int hi = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing");
        if (lo >= hi) throw ConfigError("shells", "kmin must be below kmax");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw ConfigError("shells", "expected integers kmin:kmax, got '" + text + "'");
    }
}

struct DyadicDecomposition {
    BumpProfile profile{};
    int k_min = 0;
    int k_max = 1;

    DyadicDecomposition() = default;
    DyadicDecomposition(int kmin, int kmax, BumpProfile p = {}) : profile(p), k_min(kmin), k_max(kmax) {
        if (kmin >= kmax) throw DomainError("decomposition needs k_min < k_max");
    }
    explicit DyadicDecomposition(ShellRange r) : DyadicDecomposition(r.kmin, r.kmax) {}

    ShellRange range() const noexcept { return {k_min, k_max}; }
    double shell(int k, double r) const noexcept { return profile(r / std::ldexp(1.0, k)); }
};

enum class MaskDomain { spatial, frequency };

inline const char* to_string(MaskDomain d) { return d == MaskDomain::spatial ? "spatial" : "frequency"; }

/// Shell masks indexed k_min..k_max, each a real array on the physical or FFT-ordered frequency lattice.
struct MaskFamily {
    MaskDomain domain = MaskDomain::spatial;
    Grid grid;
    DyadicDecomposition decomp;
    std::vector<RVec> masks;

    int k_min() const noexcept { return decomp.k_min; }
    int k_max() const noexcept { return decomp.k_max; }
    std::size_t count() const noexcept { return masks.size(); }
    const RVec& operator[](int k) const {
        if (k < decomp.k_min || k > decomp.k_max) throw DomainError("shell index " + std::to_string(k) + " outside family");
        return masks[static_cast<std::size_t>(k - decomp.k_min)];
    }
    RVec sum() const {
        RVec total(grid.size(), 0.0);
        for (const auto& m : masks)
            for (std::size_t i = 0; i < m.size(); ++i) total[i] += m[i];
        return total;
    }
};

namespace detail {

inline RVec shell_values(const DyadicDecomposition& d, const RVec& radii, int k) {
    RVec out(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) out[i] = d.shell(k, radii[i]);
    return out;
}

inline void check_shell_bounds(const DyadicDecomposition& d, double finest, double coarsest, const char* fine_name,
                               const char* coarse_name) {
    const double inner = std::ldexp(1.0, d.k_min - 1);
    const double outer = std::ldexp(1.0, d.k_max + 1);
    if (inner < finest * (1.0 - 1e-12))
        throw RangeError(std::string("2^(k_min-1) = ") + std::to_string(inner) + " is below the " + fine_name + " " +
                         std::to_string(finest));
    if (outer > coarsest * (1.0 + 1e-12))
        throw RangeError(std::string("2^(k_max+1) = ") + std::to_string(outer) + " exceeds the " + coarse_name + " " +
                         std::to_string(coarsest));
}

} // namespace detail

/// Q_k(x) = phi(|x| / 2^k) for every shell of the decomposition.
inline MaskFamily spatial_masks(const DyadicDecomposition& d, const Grid& g) {
    detail::check_shell_bounds(d, g.spacing(), g.half_width(), "grid spacing", "grid half-width");
    MaskFamily fam{MaskDomain::spatial, g, d, {}};
    const RVec r = g.radii();
    for (int k = d.k_min; k <= d.k_max; ++k) fam.masks.push_back(detail::shell_values(d, r, k));
    return fam;
}

/// P_k(xi) = phi(|xi| / 2^k) on the FFT-ordered frequency lattice.
inline MaskFamily frequency_masks(const DyadicDecomposition& d, const Grid& g) {
    detail::check_shell_bounds(d, g.frequency_step(), g.nyquist(), "frequency step pi/L", "Nyquist frequency pi/h");
    MaskFamily fam{MaskDomain::frequency, g, d, {}};
    const RVec r = g.frequency_radii();
    for (int k = d.k_min; k <= d.k_max; ++k) fam.masks.push_back(detail::shell_values(d, r, k));
    return fam;
}

/// Q_{m-1} + Q_m + Q_{m+1}: equals 1 on the support of Q_m.
inline RVec plateau_mask(const DyadicDecomposition& d, const Grid& g, int m) {
    const RVec r = g.radii();
    RVec out(r.size(), 0.0);
    for (int k = m - 1; k <= m + 1; ++k) {
        const RVec q = detail::shell_values(d, r, k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += q[i];
    }
    return out;
}

/// (Q_{m-1} + Q_m + Q_{m+1}) / 3: summed over all m this is again a partition of unity.
inline RVec averaged_mask(const DyadicDecomposition& d, const Grid& g, int m) {
    RVec out = plateau_mask(d, g, m);
    for (auto& v : out) v /= 3.0;
    return out;
}

/// Finitely supported complex sequence over Z.
struct WeightedSeq {
    std::map<int, cplx> entries;

    WeightedSeq() = default;
    explicit WeightedSeq(std::map<int, cplx> e) : entries(std::move(e)) {}

    static WeightedSeq impulse(int k, cplx v = 1.0) { return WeightedSeq({{k, v}}); }
    static WeightedSeq constant(int lo, int hi, cplx v = 1.0) {
        WeightedSeq a;
        for (int k = lo; k < hi; ++k) a.entries[k] = v;
        return a;
    }

    cplx operator[](int k) const {
        const auto it = entries.find(k);
        return it == entries.end() ? cplx{} : it->second;
    }
    bool empty() const noexcept { return entries.empty(); }
    int min_index() const { return entries.begin()->first; }
    int max_index() const { return entries.rbegin()->first; }

    WeightedSeq shifted(int by) const {
        WeightedSeq out;
        for (const auto& [k, v] : entries) out.entries[k + by] = v;
        return out;
    }

    friend WeightedSeq operator+(const WeightedSeq& a, const WeightedSeq& b) {
        WeightedSeq out = a;
        for (const auto& [k, v] : b.entries) out.entries[k] += v;
        return out;
    }
    friend WeightedSeq operator*(cplx c, const WeightedSeq& a) {
        WeightedSeq out = a;
        for (auto& [k, v] : out.entries) v *= c;
        return out;
    }
    bool operator==(const WeightedSeq&) const = default;
};

namespace detail {

inline void check_exponent(double q) {
    if (!(q >= 1.0)) throw DomainError("exponent q must lie in [1, inf], got " + std::to_string(q));
}

// l^q norm of nonnegative terms, scaled by the largest term so large weights do not overflow.
inline double lq_of_terms(const std::vector<double>& terms, double q) {
    double peak = 0.0;
    for (double t : terms) peak = std::max(peak, t);
    if (peak == 0.0 || std::isinf(q)) return peak;
    double acc = 0.0;
    for (double t : terms) acc += std::pow(t / peak, q);
    return peak * std::pow(acc, 1.0 / q);
}

} // namespace detail

/// (sum_k 2^{k q alpha} |a_k|^q)^{1/q}, or sup_k 2^{k alpha}|a_k| for q = inf.
inline double seq_norm(const WeightedSeq& a, double q, double alpha) {
    detail::check_exponent(q);
    std::vector<double> terms;
    terms.reserve(a.entries.size());
    for (const auto& [k, v] : a.entries) terms.push_back(std::exp2(k * alpha) * std::abs(v));
    return detail::lq_of_terms(terms, q);
}

/// Finitely supported complex sequence over Z^2.
struct WeightedSeq2 {
    std::map<std::pair<int, int>, cplx> entries;

    cplx operator()(int k1, int k2) const {
        const auto it = entries.find({k1, k2});
        return it == entries.end() ? cplx{} : it->second;
    }

    static WeightedSeq2 tensor(const WeightedSeq& u, const WeightedSeq& v) {
        WeightedSeq2 out;
        for (const auto& [k1, a] : u.entries)
            for (const auto& [k2, b] : v.entries) out.entries[{k1, k2}] = a * b;
        return out;
    }
};

/// Iterated norm over Z^2; `inner_axis` (0 for k1, 1 for k2) is summed first.
struct MixedNormSpec {
    int inner_axis = 0;
    double q_inner = 2.0;
    double q_outer = 2.0;
    double alpha_inner = 0.0;
    double alpha_outer = 0.0;

    std::string ordering() const {
        auto q = [](double v) { return std::isinf(v) ? std::string("inf") : std::to_string(v).substr(0, 4); };
        const char* inner = inner_axis == 0 ? "k1" : "k2";
        const char* outer = inner_axis == 0 ? "k2" : "k1";
        return "l^" + q(q_outer) + "_" + outer + " l^" + q(q_inner) + "_" + inner;
    }
};

inline double seq2_norm(const WeightedSeq2& a, const MixedNormSpec& spec) {
    detail::check_exponent(spec.q_inner);
    detail::check_exponent(spec.q_outer);
    if (spec.inner_axis != 0 && spec.inner_axis != 1) throw DomainError("inner_axis must be 0 or 1");
    std::map<int, std::vector<double>> inner;
    for (const auto& [idx, v] : a.entries) {
        const int ki = spec.inner_axis == 0 ? idx.first : idx.second;
        const int ko = spec.inner_axis == 0 ? idx.second : idx.first;
        inner[ko].push_back(std::exp2(ki * spec.alpha_inner) * std::abs(v));
    }
    std::vector<double> outer;
    for (const auto& [ko, terms] : inner) outer.push_back(std::exp2(ko * spec.alpha_outer) * detail::lq_of_terms(terms, spec.q_inner));
    return detail::lq_of_terms(outer, spec.q_outer);
}

} // namespace lpsmooth
