#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "spectral.hpp"

namespace lpsmooth {

/// Exponent q, spatial weight a and smoothness s of an l_x^{q,a} H^s norm.
struct NormSpec {
    double q = 2.0;
    double a = 0.0;
    double s = 0.0;
};

/// mask_then_D: Q_k |D|^s f.  D_then_mask: |D|^s (Q_k f).  weight_product: |D|^s (|x|^a Q_k f).
enum class Variant { mask_then_D, D_then_mask, weight_product };

inline const char* to_string(Variant v) {
    switch (v) {
    case Variant::mask_then_D: return "mask_then_D";
    case Variant::D_then_mask: return "D_then_mask";
    case Variant::weight_product: return "weight_product";
    }
    return "?";
}

struct NormResult {
    double value = 0.0;
    /// ||(1 - sum_k Q_k) f|| / ||f||: mass of f outside the truncated shell range.
    double tail_fraction = 0.0;
};

/// Grid plus the spatial (and optionally frequency) shell families every composite norm is built from.
class NormContext {
public:
    NormContext(const Grid& g, ShellRange spatial, std::optional<ShellRange> frequency = std::nullopt)
        : grid_(g), spatial_(spatial), radii_(g.radii()), masks_(spatial_masks(DyadicDecomposition(spatial), g)) {
        if (frequency) freq_masks_ = frequency_masks(DyadicDecomposition(*frequency), g);
        coverage_ = masks_.sum();
    }

    const Grid& grid() const noexcept { return grid_; }
    ShellRange shells() const noexcept { return spatial_; }
    const MaskFamily& masks() const noexcept { return masks_; }
    const RVec& radii() const noexcept { return radii_; }
    const RVec& coverage() const noexcept { return coverage_; }
    bool has_frequency_shells() const noexcept { return freq_masks_.has_value(); }
    const MaskFamily& frequency_masks_family() const {
        if (!freq_masks_) throw DomainError("context was built without frequency shells");
        return *freq_masks_;
    }

    /// Closed annulus 2^{k-1} <= |x| <= 2^{k+1} as a 0/1 weight.
    RVec annulus(int k) const {
        const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k + 1);
        RVec w(radii_.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = (radii_[i] >= lo && radii_[i] <= hi) ? 1.0 : 0.0;
        return w;
    }

    /// Radii R = 2^{j/2} spanning every annulus boundary of the shell range.
    std::vector<double> ladder() const {
        std::vector<double> r;
        for (int j = 2 * (spatial_.kmin - 1); j <= 2 * (spatial_.kmax + 1); ++j) r.push_back(std::exp2(0.5 * j));
        return r;
    }

private:
    Grid grid_;
    ShellRange spatial_;
    RVec radii_;
    MaskFamily masks_;
    std::optional<MaskFamily> freq_masks_;
    RVec coverage_;
};

namespace detail {

inline double weighted_l2(const Field& f, const RVec& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * w[i] * std::norm(f.samples[i]);
    return std::sqrt(acc * f.grid.cell_volume());
}

inline double tail_fraction(const Field& f, const NormContext& ctx) {
    const double total = l2_norm(f);
    if (total == 0.0) return 0.0;
    RVec rest(ctx.coverage().size());
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = 1.0 - ctx.coverage()[i];
    return weighted_l2(f, rest) / total;
}

} // namespace detail

/// Per-shell values ||B_k f||_{L^2} of the chosen variant, before the 2^{ka} weights.
inline std::vector<double> shell_terms(const Field& f, const NormSpec& spec, Variant variant, const NormContext& ctx) {
    check_smoothness(spec.s);
    const auto& fam = ctx.masks();
    std::vector<double> terms;
    terms.reserve(fam.count());
    if (variant == Variant::mask_then_D) {
        const Field g = fractional_laplacian(f, spec.s);
        for (int k = fam.k_min(); k <= fam.k_max(); ++k) terms.push_back(detail::weighted_l2(g, fam[k]));
        return terms;
    }
    const RVec sym = fractional_symbol(f.grid, spec.s);
    for (int k = fam.k_min(); k <= fam.k_max(); ++k) {
        Field g = f * fam[k];
        if (variant == Variant::weight_product)
            for (std::size_t i = 0; i < g.size(); ++i) g.samples[i] *= ctx.radii()[i] > 0.0 ? std::pow(ctx.radii()[i], spec.a) : 0.0;
        const CVec c = to_spectrum(g);
        double acc = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) acc += std::norm(c[i]) * sym[i] * sym[i];
        terms.push_back(std::sqrt(acc * f.grid.cell_volume()));
    }
    return terms;
}

/// l_x^{q,a} H^s norm: (sum_k 2^{kqa} ||B_k f||^q)^{1/q}; weight_product carries |x|^a inside and no 2^{ka}.
inline NormResult lqa_sobolev_norm(const Field& f, const NormSpec& spec, Variant variant, const NormContext& ctx) {
    detail::check_exponent(spec.q);
    const auto terms = shell_terms(f, spec, variant, ctx);
    if (terms.empty()) throw DomainError("empty shell range");
    std::vector<double> weighted(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const int k = ctx.shells().kmin + static_cast<int>(i);
        weighted[i] = variant == Variant::weight_product ? terms[i] : std::exp2(k * spec.a) * terms[i];
    }
    return {detail::lq_of_terms(weighted, spec.q), detail::tail_fraction(f, ctx)};
}

/// sup_R (R^{-1} int_{|x|<=R} |f|^2)^{1/2} over the dyadic half-step ladder.
inline double morrey_campanato(const Field& f, const NormContext& ctx) {
    const auto& r = ctx.radii();
    double best = 0.0;
    for (double R : ctx.ladder()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i] <= R) acc += std::norm(f.samples[i]);
        best = std::max(best, std::sqrt(acc * f.grid.cell_volume() / R));
    }
    return best;
}

inline std::vector<double> annulus_norms(const Field& f, const NormContext& ctx) {
    std::vector<double> out;
    for (int k = ctx.shells().kmin; k <= ctx.shells().kmax; ++k) out.push_back(detail::weighted_l2(f, ctx.annulus(k)));
    return out;
}

/// sum_k 2^{k/2} ||f||_{L^2(2^{k-1} <= |x| <= 2^{k+1})}.
inline double n_norm(const Field& f, const NormContext& ctx) {
    const auto a = annulus_norms(f, ctx);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::exp2(0.5 * (ctx.shells().kmin + static_cast<int>(i))) * a[i];
    return acc;
}

/// sup_k 2^{-k/2} ||f||_{L^2(2^{k-1} <= |x| <= 2^{k+1})}.
inline double dual_sup_norm(const Field& f, const NormContext& ctx) {
    const auto a = annulus_norms(f, ctx);
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        best = std::max(best, std::exp2(-0.5 * (ctx.shells().kmin + static_cast<int>(i))) * a[i]);
    return best;
}

/// Time-L^2 (trapezoid) of a per-slice spatial norm.
template<class SliceNorm>
double time_l2(const SpaceTimeField& u, SliceNorm&& norm) {
    if (u.size() < 2) throw DomainError("space-time norm needs at least two time slices");
    const auto w = trapezoid_weights(u.times);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = norm(u.slices[i]);
        acc += w[i] * v * v;
    }
    return std::sqrt(acc);
}

inline constexpr NormSpec kYSpec{1.0, 0.5, -0.5};
inline constexpr NormSpec kYPrimeSpec{kInf, -0.5, 0.5};

/// L^2_t l_x^{1,1/2} H^{-1/2}.
inline double y_norm(const SpaceTimeField& F, const NormContext& ctx) {
    return time_l2(F, [&](const Field& f) { return lqa_sobolev_norm(f, kYSpec, Variant::D_then_mask, ctx).value; });
}

/// L^2_t l_x^{inf,-1/2} H^{1/2}.
inline double yprime_norm(const SpaceTimeField& u, const NormContext& ctx) {
    return time_l2(u, [&](const Field& f) { return lqa_sobolev_norm(f, kYPrimeSpec, Variant::D_then_mask, ctx).value; });
}

/// sup_t ||u(t)||_{L^2} over the slices.
inline double linf_l2(const SpaceTimeField& u) {
    double best = 0.0;
    for (const auto& s : u.slices) best = std::max(best, l2_norm(s));
    return best;
}

/// int ||F(t)||_{L^2} dt by the trapezoid rule.
inline double l1_l2(const SpaceTimeField& F) {
    const auto w = trapezoid_weights(F.times);
    double acc = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) acc += w[i] * l2_norm(F.slices[i]);
    return acc;
}

/// (sum_j ||P_j(D) f||^2_{l_x^{q,a} H^s})^{1/2} over the frequency shells of the context.
inline double phase_localized_norm(const Field& f, const NormSpec& spec, const NormContext& ctx,
                                   Variant inner = Variant::D_then_mask) {
    const auto& fam = ctx.frequency_masks_family();
    const CVec c = to_spectrum(f);
    double acc = 0.0;
    for (int j = fam.k_min(); j <= fam.k_max(); ++j) {
        CVec cj = c;
        const RVec& p = fam[j];
        for (std::size_t i = 0; i < cj.size(); ++i) cj[i] *= p[i];
        const double v = lqa_sobolev_norm(from_spectrum(f.grid, std::move(cj)), spec, inner, ctx).value;
        acc += v * v;
    }
    return std::sqrt(acc);
}

struct EquivalenceReport {
    NormSpec spec;
    double mask_then_D = 0.0;
    double D_then_mask = 0.0;
    double weight_product = 0.0;
    /// Ratios mask_then_D / D_then_mask, mask_then_D / weight_product, D_then_mask / weight_product.
    double r_md_dm = 0.0, r_md_wp = 0.0, r_dm_wp = 0.0;
    double max_ratio = 0.0;
    double tail_fraction = 0.0;
    bool flagged = false;
    std::string flag_reason;
};

/// Symmetric ratio max(a/b, b/a); infinite if exactly one side vanishes.
inline double symmetric_ratio(double a, double b) {
    if (a == 0.0 && b == 0.0) return 1.0;
    if (a == 0.0 || b == 0.0) return kInf;
    return std::max(a / b, b / a);
}

inline EquivalenceReport equivalence_report(const Field& f, const NormSpec& spec, const NormContext& ctx, double ceiling = 16.0) {
    const double n = ctx.grid().dim();
    if (!(std::abs(spec.a) + std::abs(spec.s) < n / 2.0))
        throw DomainError("equivalence requires |a| + |s| < n/2");
    EquivalenceReport r;
    r.spec = spec;
    const auto md = lqa_sobolev_norm(f, spec, Variant::mask_then_D, ctx);
    r.mask_then_D = md.value;
    r.D_then_mask = lqa_sobolev_norm(f, spec, Variant::D_then_mask, ctx).value;
    r.weight_product = lqa_sobolev_norm(f, spec, Variant::weight_product, ctx).value;
    r.tail_fraction = md.tail_fraction;
    if (r.mask_then_D == 0.0 && r.D_then_mask == 0.0 && r.weight_product == 0.0) {
        r.flagged = true;
        r.flag_reason = "degenerate: all norms vanish";
        return r;
    }
    auto ratio = [](double a, double b) { return b == 0.0 ? kInf : a / b; };
    r.r_md_dm = ratio(r.mask_then_D, r.D_then_mask);
    r.r_md_wp = ratio(r.mask_then_D, r.weight_product);
    r.r_dm_wp = ratio(r.D_then_mask, r.weight_product);
    r.max_ratio = std::max({symmetric_ratio(r.mask_then_D, r.D_then_mask), symmetric_ratio(r.mask_then_D, r.weight_product),
                            symmetric_ratio(r.D_then_mask, r.weight_product)});
    if (r.max_ratio > ceiling) {
        r.flagged = true;
        r.flag_reason = "pairwise ratio above ceiling";
    }
    return r;
}

} // namespace lpsmooth
