#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "parallel.hpp"
#include "power_iteration.hpp"
#include "radial.hpp"
#include "spectral.hpp"

namespace lpsmooth {

/// t(k,m,s,p) = k n/p + m n/p' - (n - s+)(k v m) - s+ (k ^ m), s+ = max(s, 0).
inline double predicted_exponent(int k, int m, double s, double p, int n) {
    if (!(p > 1.0) || std::isinf(p)) throw DomainError("predicted exponent needs p in (1, inf)");
    const double sp = std::max(s, 0.0);
    const double pp = 1.0 - 1.0 / p;
    return k * n / p + m * n * pp - (n - sp) * std::max(k, m) - sp * std::min(k, m);
}

/// Q_k |D|^{-s} Q_m |D|^s on the periodic grid.
class CommutatorOp {
public:
    CommutatorOp(int k, int m, double s, const MaskFamily& masks)
        : k_(k), m_(m), s_(s), grid_(masks.grid), qk_(masks[k]), qm_(masks[m]) {
        if (masks.domain != MaskDomain::spatial) throw DomainError("commutator needs spatial masks");
        if (!(std::abs(s) < 1.0)) throw DomainError("commutator needs |s| < 1");
        plus_ = fractional_symbol(grid_, s);
        minus_ = fractional_symbol(grid_, -s);
    }

    int k() const noexcept { return k_; }
    int m() const noexcept { return m_; }
    double s() const noexcept { return s_; }

    // Order 0 is the identity multiplier (regular at xi = 0), so the operator is the plain mask product.
    Field apply(const Field& f) const {
        if (s_ == 0.0) return f * qm_ * qk_;
        Field g = apply_multiplier(f, plus_);
        g *= qm_;
        g = apply_multiplier(g, minus_);
        g *= qk_;
        return g;
    }

    Field adjoint(const Field& f) const {
        if (s_ == 0.0) return f * qk_ * qm_;
        Field g = f * qk_;
        g = apply_multiplier(g, minus_);
        g *= qm_;
        return apply_multiplier(g, plus_);
    }

    PowerResult norm(const PowerOptions& opt, std::uint64_t seed) const {
        auto start = [&](int trial) {
            std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial) * 0x9E3779B97F4A7C15ull);
            std::normal_distribution<double> nd;
            Field f(grid_);
            for (auto& v : f.samples) v = cplx(nd(rng), nd(rng));
            return remove_mean(std::move(f));
        };
        return power_norm([this](const Field& f) { return apply(f); }, [this](const Field& f) { return adjoint(f); }, start,
                          [](const Field& f) { return l2_norm(f); }, opt);
    }

    /// Norm of the adjoint, by power iteration on A A*.
    PowerResult adjoint_norm(const PowerOptions& opt, std::uint64_t seed) const {
        auto start = [&](int trial) {
            std::mt19937_64 rng(seed + 77 + static_cast<std::uint64_t>(trial) * 0x9E3779B97F4A7C15ull);
            std::normal_distribution<double> nd;
            Field f(grid_);
            for (auto& v : f.samples) v = cplx(nd(rng), nd(rng));
            return remove_mean(std::move(f));
        };
        return power_norm([this](const Field& f) { return adjoint(f); }, [this](const Field& f) { return apply(f); }, start,
                          [](const Field& f) { return l2_norm(f); }, opt);
    }

private:
    int k_, m_;
    double s_;
    Grid grid_;
    RVec qk_, qm_, plus_, minus_;
};

struct DecayRecord {
    int k = 0;
    int m = 0;
    double s = 0.0;
    double measured_log2 = 0.0;
    double predicted_t = 0.0;
    /// measured - predicted.
    double residual = 0.0;
    double spread = 0.0;
    /// Harmonic degree attaining the norm (radial engine), -1 for the Cartesian engine.
    int channel = -1;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit y = slope x + intercept over finite points.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        ++n;
    }
    if (n < 2) throw DomainError("regression needs at least two finite points");
    const double d = n * sxx - sx * sx;
    if (d == 0.0) throw DomainError("regression abscissae are all equal");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / d;
    f.intercept = (sy - f.slope * sx) / n;
    f.points = n;
    return f;
}

inline LinearFit fit_records(const std::vector<DecayRecord>& recs) {
    std::vector<double> x, y;
    for (const auto& r : recs) {
        x.push_back(r.predicted_t);
        y.push_back(r.measured_log2);
    }
    return fit_line(x, y);
}

struct ScanOptions {
    int n = 3;
    int min_gap = 3;
    /// Harmonic degrees 0..max_channel are scanned by the radial engine.
    int max_channel = 3;
    RadialGrid radial{};
    PowerOptions power{2, 200, 1e-8};
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Operator norm of the (k, m, s) commutator on L^2(R^n): max over harmonic degrees of the channel norms.
inline DecayRecord radial_record(int k, int m, double s, const ScanOptions& opt) {
    DecayRecord rec{k, m, s};
    double best = 0.0, spread = 0.0;
    for (int ell = 0; ell <= opt.max_channel; ++ell) {
        const RadialCommutator op(opt.n, ell, k, m, s, opt.radial);
        const auto res = op.norm(opt.power, opt.seed + static_cast<std::uint64_t>(ell));
        if (res.norm > best) {
            best = res.norm;
            spread = res.spread;
            rec.channel = ell;
        }
    }
    rec.measured_log2 = best > 0.0 ? std::log2(best) : -kInf;
    rec.predicted_t = predicted_exponent(k, m, s, 2.0, opt.n);
    rec.residual = rec.measured_log2 - rec.predicted_t;
    rec.spread = spread;
    return rec;
}

/// One record per (k, m) with |k - m| >= min_gap, evaluated with the log-radial engine.
inline std::vector<DecayRecord> decay_scan(double s, ShellRange k_range, ShellRange m_range, const ScanOptions& opt) {
    if (!(std::abs(s) < 1.0)) throw DomainError("commutator needs |s| < 1");
    std::vector<std::pair<int, int>> pairs;
    for (int k = k_range.kmin; k <= k_range.kmax; ++k)
        for (int m = m_range.kmin; m <= m_range.kmax; ++m)
            if (std::abs(k - m) >= opt.min_gap) pairs.emplace_back(k, m);
    return parallel_map(pairs.size(), opt.workers, [&](std::size_t i) { return radial_record(pairs[i].first, pairs[i].second, s, opt); });
}

/// Records for the Cartesian engine on a grid (for cross-validation of the radial scan).
inline DecayRecord cartesian_record(int k, int m, double s, const MaskFamily& masks, const PowerOptions& power, std::uint64_t seed) {
    DecayRecord rec{k, m, s};
    const CommutatorOp op(k, m, s, masks);
    const auto res = op.norm(power, seed);
    rec.measured_log2 = res.norm > 0.0 ? std::log2(res.norm) : -kInf;
    rec.predicted_t = predicted_exponent(k, m, s, 2.0, masks.grid.dim());
    rec.residual = rec.measured_log2 - rec.predicted_t;
    rec.spread = res.spread;
    return rec;
}

} // namespace lpsmooth
