#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commutators.hpp"
#include "discrete.hpp"
#include "ensemble.hpp"
#include "harness.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "semilinear.hpp"

namespace lpsmooth {

/// Suite inputs after merging the config file and the command line. Unset optionals select suite defaults.
struct SuiteConfig {
    std::uint64_t seed = 1;
    std::optional<int> dim;
    std::optional<int> grid;
    std::optional<ShellRange> shells;
    std::optional<int> ensemble;
    int parallel = 1;
    /// Suite-specific key=value parameters.
    std::map<std::string, std::string> params;

    int dimension(int def) const {
        const int n = dim.value_or(def);
        if (n < 1) throw ConfigError("dim", "dimension must be >= 1");
        return n;
    }
    int points(int def) const {
        const int N = grid.value_or(def);
        if (N < 2 || (N & (N - 1)) != 0) throw ConfigError("grid", "points per axis must be a power of two >= 2");
        return N;
    }
    std::size_t members(std::size_t def) const {
        const int m = ensemble.value_or(static_cast<int>(def));
        if (m < 1) throw ConfigError("ensemble", "ensemble size must be >= 1");
        return static_cast<std::size_t>(m);
    }
    ShellRange shell_range(ShellRange def) const { return shells.value_or(def); }

    bool has(const std::string& key) const { return params.count(key) > 0; }

    std::string text(const std::string& key, const std::string& def) const {
        const auto it = params.find(key);
        return it == params.end() ? def : it->second;
    }
    double real(const std::string& key, double def) const {
        const auto it = params.find(key);
        return it == params.end() ? def : parse_real(key, it->second);
    }
    int integer(const std::string& key, int def) const {
        const auto it = params.find(key);
        if (it == params.end()) return def;
        try {
            std::size_t used = 0;
            const int v = std::stoi(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::logic_error&) {
            throw ConfigError(key, "expected an integer, got '" + it->second + "'");
        }
    }
    std::vector<double> reals(const std::string& key, std::vector<double> def) const {
        const auto it = params.find(key);
        if (it == params.end()) return def;
        std::vector<double> out;
        std::stringstream ss(it->second);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_real(key, item));
        if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
        return out;
    }
    std::vector<int> integers(const std::string& key, std::vector<int> def) const {
        if (!has(key)) return def;
        std::vector<int> out;
        for (double v : reals(key, {})) {
            if (v != std::floor(v) || !std::isfinite(v)) throw ConfigError(key, "expected integers");
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

    static double parse_real(const std::string& key, const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::logic_error&) {
            throw ConfigError(key, "expected a number, got '" + s + "'");
        }
    }
};

struct SuiteInfo {
    std::string name;
    /// The estimate or identity the suite certifies.
    std::string anchor;
    std::vector<std::string> params;
};

inline const std::vector<SuiteInfo>& list_suites() {
    static const std::vector<SuiteInfo> catalog{
        {"partition", "dyadic partition of unity in space and frequency", {"points", "half_width"}},
        {"equivalence", "equivalence of the three weighted dyadic Sobolev norm orderings", {"q", "a", "s", "half_width"}},
        {"phase-localization", "phase-localized embeddings of the weighted Sobolev spaces", {"q", "a", "s", "half_width"}},
        {"commutator-scan", "off-diagonal decay of dyadic fractional commutators", {"s", "min_gap", "max_channel", "half_width"}},
        {"discrete-bounds", "weighted discrete kernel bound on dyadic sequences",
         {"q", "lambda", "mu", "beta", "windows", "control_beta", "control_windows"}},
        {"kpv", "smoothing estimate", {"nodes", "horizon", "half_width"}},
        {"main-estimate", "smoothing estimate for the magnetic flow under a smallness condition",
         {"audit", "nodes", "horizon", "half_width"}},
        {"endpoint", "endpoint energy and smoothing estimate of the free flow", {"nodes", "horizon", "half_width"}},
        {"resolvent-1d", "one-dimensional resolvent bound", {"lambda", "w", "cells"}},
        {"resolvent-nd", "resolvent smoothing bound in several dimensions", {"half_width"}},
        {"mixed-norm", "mixed-norm smoothing estimate and dyadic shell inclusions", {"nodes", "horizon", "half_width"}},
        {"product-interp", "product, interpolation, Sobolev and Hardy inequalities", {"half_width"}},
        {"semilinear", "small-data well-posedness of the semilinear magnetic equation",
         {"a", "v0", "width", "audit", "nodes", "horizon", "tol", "max_iterations", "delta_lo", "delta_hi", "bisections", "half_width"}},
    };
    return catalog;
}

/// "name → anchor".
inline std::string catalog_line(const SuiteInfo& s) { return s.name + " → " + s.anchor; }

inline const SuiteInfo& find_suite(const std::string& name) {
    for (const auto& s : list_suites())
        if (s.name == name) return s;
    throw ConfigError("suite", "unknown suite '" + name + "'");
}

namespace detail {

inline int ceil_log2(double x) { return static_cast<int>(std::ceil(std::log2(x) - 1e-12)); }
inline int floor_log2(double x) { return static_cast<int>(std::floor(std::log2(x) + 1e-12)); }

/// Widest spatial shell range the grid resolves: 2^{kmin-1} >= h and 2^{kmax+1} <= L.
inline ShellRange spatial_fit(const Grid& g) { return {ceil_log2(g.spacing()) + 1, floor_log2(g.half_width()) - 1}; }

/// Widest frequency shell range: 2^{kmin-1} >= pi/L and 2^{kmax+1} <= pi/h.
inline ShellRange frequency_fit(const Grid& g) { return {ceil_log2(g.frequency_step()) + 1, floor_log2(g.nyquist()) - 1}; }

inline double max_abs_diff(const Field& a, const Field& b) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a.samples[i] - b.samples[i]));
    return best;
}

inline std::string label(const std::string& key, double v) { return key + "=" + format_number(v); }

inline json ensemble_json(const EnsembleSpec& s, std::uint64_t seed, std::size_t count, const std::string& kind) {
    return {{"kind", kind},
            {"members", count},
            {"seed", seed},
            {"packets", {s.packets_min, s.packets_max}},
            {"radius", {s.radius_min, s.radius_max}},
            {"width", {s.width_min, s.width_max}},
            {"carrier", {s.carrier_min, s.carrier_max}},
            {"omega_max", s.omega_max},
            {"horizon", s.horizon}};
}

inline SuiteResult start(const std::string& name) {
    SuiteResult r;
    r.suite = name;
    r.anchor = find_suite(name).anchor;
    r.metadata["grids"] = json::array();
    return r;
}

inline void note_grid(SuiteResult& r, const Grid& g, ShellRange shells) {
    json j = grid_json(g);
    j["shells"] = {shells.kmin, shells.kmax};
    r.metadata["grids"].push_back(j);
}

inline double ensemble_max(const std::vector<EstimateReport>& reps) { return summarize(reps).max_ratio; }

inline std::vector<double> scaled_times(std::vector<double> t, double factor) {
    for (auto& s : t) s *= factor;
    return t;
}

/// Max over lattice points with 2^{kmin} <= |x| <= 2^{kmax} (rejection-sampled) of |sum of masks - 1|.
inline double lattice_partition_error(const MaskFamily& fam, const RVec& radii, int count, std::mt19937_64& rng) {
    const RVec total = fam.sum();
    const double lo = std::ldexp(1.0, fam.k_min()), hi = std::ldexp(1.0, fam.k_max());
    std::uniform_int_distribution<std::size_t> pick(0, radii.size() - 1);
    double err = 0.0;
    int found = 0;
    for (long attempts = 0; found < count; ++attempts) {
        if (attempts > 1000L * count) throw RangeError("no lattice points inside the covered annulus");
        const std::size_t i = pick(rng);
        if (radii[i] < lo || radii[i] > hi) continue;
        err = std::max(err, std::abs(total[i] - 1.0));
        ++found;
    }
    return err;
}

} // namespace detail

// ---------------------------------------------------------------------------------------------
// Suites. Every tolerance below is the pinned acceptance threshold of the corresponding check.

inline SuiteResult run_partition(const SuiteConfig& cfg) {
    auto res = detail::start("partition");
    GroupTimer timer(res, "partition");
    const int n = cfg.dimension(3);
    const ShellRange sh = cfg.shell_range({-3, 4});
    const int count = cfg.integer("points", 1000);
    if (count < 1) throw ConfigError("points", "must be >= 1");
    constexpr double tol = 1e-10;
    const DyadicDecomposition d(sh);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01;
    double err = 0.0;
    for (int i = 0; i < count; ++i) {
        const double r = std::exp2(sh.kmin + (sh.kmax - sh.kmin) * u01(rng));
        const auto x = detail::random_direction(rng, n, r);
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        double sum = 0.0;
        for (int k = sh.kmin; k <= sh.kmax; ++k) sum += d.shell(k, std::sqrt(r2));
        err = std::max(err, std::abs(sum - 1.0));
    }
    res.rows.push_back(plain_row("partition_error", "spatial_function", err, tol));
    res.verdicts.push_back(check_le("spatial_partition", "partition", err, tol, std::to_string(count) + " random points"));

    const Grid g(n, cfg.real("half_width", 8.0), cfg.points(n <= 3 ? 64 : 16));
    const ShellRange ss = detail::spatial_fit(g), fs = detail::frequency_fit(g);
    const auto sm = spatial_masks(DyadicDecomposition(ss), g);
    const auto fm = frequency_masks(DyadicDecomposition(fs), g);
    const double es = detail::lattice_partition_error(sm, g.radii(), count, rng);
    const double ef = detail::lattice_partition_error(fm, g.frequency_radii(), count, rng);
    res.rows.push_back({"partition_error", "spatial_lattice", es, tol, es / tol, n, g.points(), g.half_width(), 0.0});
    res.rows.push_back({"partition_error", "frequency_lattice", ef, tol, ef / tol, n, g.points(), g.half_width(), 0.0});
    res.verdicts.push_back(check_le("spatial_lattice_partition", "partition", es, tol));
    res.verdicts.push_back(check_le("frequency_lattice_partition", "partition", ef, tol));
    detail::note_grid(res, g, ss);
    res.metadata["frequency_shells"] = {fs.kmin, fs.kmax};
    res.metadata["function_shells"] = {sh.kmin, sh.kmax};
    res.ensemble = {{"kind", "uniform log-radius points"}, {"members", count}, {"seed", cfg.seed}};
    return res;
}

inline SuiteResult run_discrete_bounds(const SuiteConfig& cfg) {
    auto res = detail::start("discrete-bounds");
    GroupTimer timer(res, "discrete");
    const KernelSpec spec{cfg.real("lambda", 0.5), cfg.real("mu", 0.5), cfg.real("beta", 1.0)};
    const auto qs = cfg.reals("q", {1.0, 2.0, kInf});
    const auto windows = cfg.integers("windows", {32, 64});
    constexpr double drift_tol = 0.05, geometric_tol = 1e-6;
    auto qname = [](double q) { return std::string("q=") + format_number(q); };
    for (double q : qs) {
        const auto rep = bound_probe(spec, q, windows);
        for (const auto& e : rep.entries) res.rows.push_back(plain_row("kernel_norm", qname(q) + " K=" + std::to_string(e.K), e.estimate, 1.0));
        res.verdicts.push_back(check_lt("window_drift_" + qname(q), "discrete", rep.entries.back().drift, drift_tol,
                                        "K=" + std::to_string(windows.front()) + " to K=" + std::to_string(windows.back())));
    }
    const bool symmetric = spec.lambda == spec.mu && spec.lambda == 0.5 * spec.beta;
    if (symmetric && std::any_of(qs.begin(), qs.end(), [](double q) { return std::isinf(q); })) {
        const double expected = geometric_half_sum(spec.beta);
        for (auto part : {KernelPart::upper, KernelPart::lower}) {
            const double v = norm_qinf(kernel_matrix(spec, windows.back(), 0.0, 0.0, part));
            res.rows.push_back(plain_row("geometric_constant", std::string("a=1 ") + to_string(part), v, expected));
            res.verdicts.push_back(check_le(std::string("geometric_value_") + to_string(part), "discrete", std::abs(v - expected),
                                            geometric_tol, "sum_{j>=4} 2^{-j beta/2} = " + format_number(expected)));
        }
    }
    KernelSpec control = spec;
    control.beta = cfg.real("control_beta", 0.9);
    const auto cw = cfg.integers("control_windows", {16, 32, 64, 128});
    for (double q : qs) {
        const auto rep = bound_probe(control, q, cw);
        double min_growth = kInf;
        for (std::size_t i = 1; i < rep.entries.size(); ++i)
            min_growth = std::min(min_growth, rep.entries[i].estimate / rep.entries[i - 1].estimate);
        for (const auto& e : rep.entries)
            res.rows.push_back(plain_row("control_kernel_norm", qname(q) + " K=" + std::to_string(e.K), e.estimate, 1.0));
        res.verdicts.push_back(check_gt("control_growth_" + qname(q), "discrete", min_growth, 1.0,
                                        "smallest consecutive ratio at beta=" + format_number(control.beta)));
    }
    res.metadata["kernel"] = {{"lambda", spec.lambda}, {"mu", spec.mu}, {"beta", spec.beta}, {"windows", windows}};
    res.metadata["control"] = {{"beta", control.beta}, {"windows", cw}};
    return res;
}

inline SuiteResult run_commutator_scan(const SuiteConfig& cfg) {
    auto res = detail::start("commutator-scan");
    GroupTimer timer(res, "commutator");
    ScanOptions opt;
    opt.n = cfg.dimension(3);
    opt.min_gap = cfg.integer("min_gap", 3);
    opt.max_channel = cfg.integer("max_channel", 3);
    opt.seed = cfg.seed;
    opt.workers = cfg.parallel;
    const ShellRange range = cfg.shell_range({-3, 4});
    const auto ss = cfg.reals("s", {0.5, -0.5});
    constexpr double slope_lo = 0.7, slope_hi = 1.3, covariance_tol = 0.05;
    for (double s : ss) {
        const auto recs = decay_scan(s, range, range, opt);
        for (const auto& r : recs)
            res.rows.push_back(plain_row("commutator_norm", "s=" + format_number(s) + " k=" + std::to_string(r.k) + " m=" + std::to_string(r.m),
                                         std::exp2(r.measured_log2), std::exp2(r.predicted_t)));
        const auto fit = fit_records(recs);
        res.probes["slope_s=" + format_number(s)] = fit.slope;
        res.verdicts.push_back(check_in("decay_slope_s=" + format_number(s), "commutator", fit.slope, slope_lo, slope_hi,
                                        std::to_string(fit.points) + " pairs"));
        double first = 0.0, dev = 0.0;
        for (int k = range.kmin; k <= range.kmax; ++k) {
            const auto r = radial_record(k, k, s, opt);
            const double v = std::exp2(r.measured_log2);
            res.rows.push_back(plain_row("commutator_norm", "s=" + format_number(s) + " k=" + std::to_string(k) + " m=" + std::to_string(k), v,
                                         std::exp2(r.predicted_t)));
            if (k == range.kmin) first = v;
            dev = std::max(dev, std::abs(v / first - 1.0));
        }
        res.verdicts.push_back(check_le("diagonal_covariance_s=" + format_number(s), "commutator", dev, covariance_tol));
    }

    // Cartesian cross-check on the periodic box for the diagonal shells it resolves.
    const Grid g(opt.n, cfg.real("half_width", 8.0), cfg.points(64));
    const ShellRange fit = detail::spatial_fit(g);
    if (fit.kmax >= 1 && fit.kmin <= 0) {
        const auto fam = spatial_masks(DyadicDecomposition(fit), g);
        const PowerOptions power{2, 60, 1e-7};
        const double s = ss.front();
        const auto c0 = cartesian_record(0, 0, s, fam, power, cfg.seed);
        const auto c1 = cartesian_record(1, 1, s, fam, power, cfg.seed);
        ScanOptions ro = opt;
        const double radial = std::exp2(radial_record(0, 0, s, ro).measured_log2);
        const double n0 = std::exp2(c0.measured_log2), n1 = std::exp2(c1.measured_log2);
        res.rows.push_back({"commutator_norm_grid", "s=" + format_number(s) + " k=0 m=0", n0, radial, n0 / radial, g.dim(), g.points(),
                            g.half_width(), 0.0});
        res.rows.push_back({"commutator_norm_grid", "s=" + format_number(s) + " k=1 m=1", n1, n0, n1 / n0, g.dim(), g.points(),
                            g.half_width(), 0.0});
        res.verdicts.push_back(check_le("grid_diagonal_covariance", "commutator", std::abs(n1 / n0 - 1.0), covariance_tol));
        res.verdicts.push_back(check_le("grid_matches_radial", "commutator", std::abs(n0 / radial - 1.0), covariance_tol));
        detail::note_grid(res, g, fit);
    }
    res.metadata["radial_grid"] = {{"points_per_octave", opt.radial.points_per_octave}, {"size", opt.radial.size}};
    res.metadata["pairs"] = {{"range", {range.kmin, range.kmax}}, {"min_gap", opt.min_gap}, {"max_channel", opt.max_channel}};
    return res;
}

inline SuiteResult run_equivalence(const SuiteConfig& cfg) {
    auto res = detail::start("equivalence");
    GroupTimer timer(res, "equivalence");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Grid gc(n, L, N), gf(n, L, 2 * N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(gc));
    const NormContext cc(gc, sh), cf(gf, sh);
    const NormSpec spec{cfg.real("q", 2.0), cfg.real("a", 0.5), cfg.real("s", 0.5)};
    const std::size_t m = cfg.members(50);
    const EnsembleSpec es;
    const auto recipes = field_ensemble(n, es, cfg.seed, m);
    constexpr double refine_tol = 0.15;
    double maxima[2] = {0.0, 0.0}, tail = 0.0;
    const NormContext* ctxs[2] = {&cc, &cf};
    for (int gi = 0; gi < 2; ++gi) {
        const auto& ctx = *ctxs[gi];
        const auto reps = parallel_map(m, cfg.parallel, [&](std::size_t i) { return equivalence_report(recipes[i].sample(ctx.grid()), spec, ctx); });
        for (std::size_t i = 0; i < m; ++i) {
            const auto& r = reps[i];
            const double hi = std::max({r.mask_then_D, r.D_then_mask, r.weight_product});
            const double lo = std::min({r.mask_then_D, r.D_then_mask, r.weight_product});
            res.rows.push_back({"equivalence", "N=" + std::to_string(ctx.grid().points()) + " member=" + std::to_string(i), hi, lo, r.max_ratio, n,
                                ctx.grid().points(), L, 0.0});
            maxima[gi] = std::max(maxima[gi], r.max_ratio);
            tail = std::max(tail, r.tail_fraction);
        }
        res.verdicts.push_back(check_finite("max_pairwise_ratio_N=" + std::to_string(ctx.grid().points()), "equivalence", maxima[gi]));
        detail::note_grid(res, ctx.grid(), sh);
    }
    const double change = relative_change(maxima[1], maxima[0]);
    res.probes["refinement_change"] = change;
    res.probes["max_tail_fraction"] = tail;
    res.verdicts.push_back(check_lt("refinement_change", "equivalence", change, refine_tol));
    res.metadata["norm"] = {{"q", spec.q}, {"a", spec.a}, {"s", spec.s}};
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "fields");
    return res;
}

inline SuiteResult run_phase_localization(const SuiteConfig& cfg) {
    auto res = detail::start("phase-localization");
    GroupTimer timer(res, "phase");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Grid gc(n, L, N), gf(n, L, 2 * N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(gc));
    const ShellRange fsh = detail::frequency_fit(gc);
    const NormContext cc(gc, sh, fsh), cf(gf, sh, fsh);
    const NormSpec spec{cfg.real("q", 2.0), cfg.real("a", 0.5), cfg.real("s", -0.5)};
    const NormSpec embedding{1.0, 0.5, -0.5};
    const std::size_t m = cfg.members(20);
    EnsembleSpec es;
    es.carrier_min = 1.2;
    es.carrier_max = 2.0;
    const auto recipes = field_ensemble(n, es, cfg.seed, m);
    constexpr double refine_tol = 0.15;
    struct Sides {
        double phase = 0, plain = 0, phase_q1 = 0, plain_q1 = 0;
    };
    double up[2] = {0, 0}, down[2] = {0, 0}, up_q1[2] = {0, 0};
    const NormContext* ctxs[2] = {&cc, &cf};
    for (int gi = 0; gi < 2; ++gi) {
        const auto& ctx = *ctxs[gi];
        const auto sides = parallel_map(m, cfg.parallel, [&](std::size_t i) {
            const Field f = recipes[i].sample(ctx.grid());
            return Sides{phase_localized_norm(f, spec, ctx), lqa_sobolev_norm(f, spec, Variant::D_then_mask, ctx).value,
                         phase_localized_norm(f, embedding, ctx), lqa_sobolev_norm(f, embedding, Variant::D_then_mask, ctx).value};
        });
        const std::string tag = "N=" + std::to_string(ctx.grid().points());
        for (std::size_t i = 0; i < m; ++i) {
            const auto& s = sides[i];
            res.rows.push_back(make_row(make_report("phase_localized_vs_plain", s.phase, s.plain), tag + " member=" + std::to_string(i), ctx.grid()));
            res.rows.push_back(make_row(make_report("phase_localized_vs_plain_q1", s.phase_q1, s.plain_q1), tag + " member=" + std::to_string(i),
                                        ctx.grid()));
            up[gi] = std::max(up[gi], s.plain > 0 ? s.phase / s.plain : kInf);
            down[gi] = std::max(down[gi], s.phase > 0 ? s.plain / s.phase : kInf);
            up_q1[gi] = std::max(up_q1[gi], s.plain_q1 > 0 ? s.phase_q1 / s.plain_q1 : kInf);
        }
        res.verdicts.push_back(check_finite("upper_constant_" + tag, "phase", up[gi]));
        res.verdicts.push_back(check_finite("lower_constant_" + tag, "phase", down[gi]));
        detail::note_grid(res, ctx.grid(), sh);
    }
    res.probes["upper_constant"] = {up[0], up[1]};
    res.probes["lower_constant"] = {down[0], down[1]};
    res.probes["q1_embedding_constant"] = {up_q1[0], up_q1[1]};
    res.verdicts.push_back(check_lt("upper_refinement_change", "phase", relative_change(up[1], up[0]), refine_tol));
    res.verdicts.push_back(check_lt("lower_refinement_change", "phase", relative_change(down[1], down[0]), refine_tol));
    res.metadata["norm"] = {{"q", spec.q}, {"a", spec.a}, {"s", spec.s}};
    res.metadata["frequency_shells"] = {fsh.kmin, fsh.kmax};
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "fields");
    return res;
}

inline SuiteResult run_kpv(const SuiteConfig& cfg) {
    auto res = detail::start("kpv");
    GroupTimer timer(res, "kpv");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Grid gc(n, L, N), gf(n, L, 2 * N), half(n, L / 2, N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(gc));
    const ShellRange down{sh.kmin - 1, sh.kmax - 1};
    const NormContext cc(gc, sh), cf(gf, sh), cs(gf, down), ch(half, down);
    const int nodes = cfg.integer("nodes", 33);
    const double T = cfg.real("horizon", 0.5);
    const auto times = linspace(0.0, T, static_cast<std::size_t>(nodes));
    const auto t4 = detail::scaled_times(times, 0.25);
    const std::size_t m = cfg.members(20);
    EnsembleSpec es;
    es.horizon = T;
    const auto recipes = forcing_ensemble(n, es, cfg.seed, m);
    constexpr double rescale_tol = 0.10, refine_tol = 0.15;
    struct Trio {
        EstimateReport coarse, fine, scaled;
    };
    const auto out = parallel_map(m, cfg.parallel, [&](std::size_t i) {
        const auto& r = recipes[i];
        return Trio{verify_kpv(r.sample(gc, times), cc), verify_kpv(r.sample(gf, times), cf), verify_kpv(r.sample(gf, t4, 2.0), cs)};
    });
    std::vector<EstimateReport> coarse, fine, scaled;
    double member_change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::string id = " member=" + std::to_string(i);
        res.rows.push_back(make_row(out[i].coarse, "N=" + std::to_string(N) + id, gc, times[1] - times[0]));
        res.rows.push_back(make_row(out[i].fine, "N=" + std::to_string(2 * N) + id, gf, times[1] - times[0]));
        res.rows.push_back(make_row(out[i].scaled, "rescaled N=" + std::to_string(2 * N) + id, gf, t4[1] - t4[0]));
        coarse.push_back(out[i].coarse);
        fine.push_back(out[i].fine);
        scaled.push_back(out[i].scaled);
        member_change = std::max(member_change, relative_change(out[i].scaled.ratio, out[i].fine.ratio));
    }
    const double mc = detail::ensemble_max(coarse), mf = detail::ensemble_max(fine), ms = detail::ensemble_max(scaled);
    res.verdicts.push_back(check_finite("ensemble_max_ratio_N=" + std::to_string(N), "kpv", mc));
    res.verdicts.push_back(check_finite("ensemble_max_ratio_N=" + std::to_string(2 * N), "kpv", mf));
    res.verdicts.push_back(check_lt("rescaling_change", "kpv", relative_change(ms, mf), rescale_tol, "F(t,x) -> F(4t,2x), shells shifted by -1"));
    res.verdicts.push_back(check_lt("refinement_change", "kpv", relative_change(mf, mc), refine_tol));
    const auto exact_a = verify_kpv(recipes[0].sample(gc, times), cc);
    const auto exact_b = verify_kpv(recipes[0].sample(half, t4, 2.0), ch);
    res.probes["ensemble_max"] = {{"coarse", mc}, {"fine", mf}, {"rescaled", ms}};
    res.probes["member_max_rescaling_change"] = member_change;
    res.probes["half_box_dilation_change"] = relative_change(exact_b.ratio, exact_a.ratio);
    detail::note_grid(res, gc, sh);
    detail::note_grid(res, gf, sh);
    detail::note_grid(res, gf, down);
    res.metadata["time_nodes"] = nodes;
    res.metadata["horizon"] = T;
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "forcings");
    return res;
}

inline SuiteResult run_main_estimate(const SuiteConfig& cfg) {
    auto res = detail::start("main-estimate");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Grid g(n, L, N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(g));
    const NormContext ctx(g, sh);
    const DyadicDecomposition decomp(sh);
    const auto A = potential_with_audit(packet_potential(g, 1.0), decomp, cfg.real("audit", 0.08));
    const auto A0 = MagneticPotential::zero(g);
    const double audit = smallness_audit(A, decomp).total;
    const int nodes = cfg.integer("nodes", 17);
    const double T = cfg.real("horizon", 0.5);
    const auto times = linspace(0.0, T, static_cast<std::size_t>(nodes));
    const std::size_t m = cfg.members(20);
    EnsembleSpec es;
    es.horizon = T;
    const std::uint64_t forcing_seed = member_seed(cfg.seed, 1000003);
    const auto fields = field_ensemble(n, es, cfg.seed, m);
    const auto forcings = forcing_ensemble(n, es, forcing_seed, m);
    const double budget = 0.1, inflation_tol = 2.0, consistency_tol = 1e-8;
    const double step = 0.5 * g.spacing() * g.spacing();
    {
        GroupTimer timer(res, "main");
        struct Trio {
            EstimateReport magnetic, zero, free;
        };
        const auto out = parallel_map(m, cfg.parallel, [&](std::size_t i) {
            const Field f = fields[i].sample(g);
            const auto F = forcings[i].sample(g, times);
            return Trio{verify_main(f, F, A, ctx), verify_main(f, F, A0, ctx), verify_main_free(f, F, ctx)};
        });
        double inflation = 0.0, consistency = 0.0;
        std::vector<EstimateReport> mags;
        for (std::size_t i = 0; i < m; ++i) {
            const std::string id = " member=" + std::to_string(i);
            res.rows.push_back(make_row(out[i].magnetic, "A" + id, g, step));
            res.rows.push_back(make_row(out[i].zero, "A=0" + id, g, step));
            res.rows.push_back(make_row(out[i].free, "free" + id, g, 0.0));
            inflation = std::max(inflation, out[i].magnetic.ratio / out[i].zero.ratio);
            consistency = std::max(consistency, relative_change(out[i].zero.ratio, out[i].free.ratio));
            mags.push_back(out[i].magnetic);
        }
        res.verdicts.push_back(check_le("smallness_audit", "main", audit, budget));
        res.verdicts.push_back(check_finite("ensemble_max_ratio", "main", detail::ensemble_max(mags)));
        res.verdicts.push_back(check_le("ratio_inflation", "main", inflation, inflation_tol, "paired runs against A=0"));
        res.verdicts.push_back(check_le("zero_potential_consistency", "main", consistency, consistency_tol, "A=0 solver against free pipeline"));
        res.probes["max_inflation"] = inflation;

        // u(4t, 2x) solves the free problem with data f(2x) and forcing 4 F(4t, 2x) on the half box.
        const Grid half(n, L / 2, N);
        FieldRecipe raw = fields[0];
        raw.mean_zero = false;
        SpaceTimeField F2 = forcings[0].sample(half, detail::scaled_times(times, 0.25), 2.0);
        for (auto& s : F2.slices) s *= cplx(4.0);
        const auto a = verify_main_free(raw.sample(g), forcings[0].sample(g, times), ctx);
        const auto b = verify_main_free(raw.sample(half, 2.0), F2, NormContext(half, {sh.kmin - 1, sh.kmax - 1}));
        res.probes["half_box_dilation_change"] = relative_change(b.ratio, a.ratio);
    }
    {
        GroupTimer timer(res, "magnetic");
        const Field f = fields[0].sample(g);
        const double tr = 0.5;
        auto solve = [&](double dt) {
            SolverOptions opt;
            opt.dt = dt;
            return magnetic_solve(f, {}, A, 0.0, {tr}, opt).solution.slices[0];
        };
        const Field u1 = solve(0.05), u2 = solve(0.025), u3 = solve(0.0125);
        const double e12 = l2_norm(u1 - u2), e23 = l2_norm(u2 - u3);
        const double rate = std::log2(e12 / e23);
        res.rows.push_back({"richardson_difference", "dt=0.05/0.025", e12, l2_norm(f), e12 / l2_norm(f), n, N, L, 0.05});
        res.rows.push_back({"richardson_difference", "dt=0.025/0.0125", e23, l2_norm(f), e23 / l2_norm(f), n, N, L, 0.025});
        res.verdicts.push_back(check_in("richardson_rate", "magnetic", rate, 1.7, 2.3));
        const double horizon = 1.0;
        const auto run = magnetic_solve(f, {}, A, 0.0, {horizon});
        const double drift = std::abs(l2_norm(run.solution.slices[0]) - l2_norm(f)) / l2_norm(f) / horizon;
        res.rows.push_back({"mass_drift", "default step", l2_norm(run.solution.slices[0]), l2_norm(f), drift, n, N, L, run.step});
        res.verdicts.push_back(check_lt("mass_drift_per_unit_time", "magnetic", drift, 1e-3, "default step 0.5 h^2"));
        res.verdicts.push_back(check_le("magnetic_audit", "magnetic", audit, budget));
    }
    detail::note_grid(res, g, sh);
    res.metadata["audit_total"] = audit;
    res.metadata["time_step"] = step;
    res.metadata["time_nodes"] = nodes;
    res.metadata["horizon"] = T;
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "data fields");
    res.ensemble["forcing_seed"] = forcing_seed;
    return res;
}

inline SuiteResult run_endpoint(const SuiteConfig& cfg) {
    auto res = detail::start("endpoint");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    {
        GroupTimer timer(res, "endpoint");
        const Grid g(n, L, N);
        const ShellRange sh = cfg.shell_range(detail::spatial_fit(g));
        const NormContext ctx(g, sh);
        const int nodes = cfg.integer("nodes", 17);
        const double T = cfg.real("horizon", 0.5);
        const auto times = linspace(0.0, T, static_cast<std::size_t>(nodes));
        const std::size_t m = cfg.members(20);
        EnsembleSpec es;
        es.horizon = T;
        const std::uint64_t forcing_seed = member_seed(cfg.seed, 1000003);
        const auto fields = field_ensemble(n, es, cfg.seed, m);
        const auto forcings = forcing_ensemble(n, es, forcing_seed, m);
        const auto reps = parallel_map(m, cfg.parallel, [&](std::size_t i) {
            const auto F = forcings[i].sample(g, times);
            auto splits = trivial_splits(F);
            for (auto& s : threshold_splits(F, -2, 2)) splits.push_back(std::move(s));
            return verify_free_endpoint(fields[i].sample(g), F, splits, ctx);
        });
        for (std::size_t i = 0; i < m; ++i) res.rows.push_back(make_row(reps[i], "member=" + std::to_string(i), g, times[1] - times[0]));
        const auto homogeneous = verify_free_endpoint(fields[0].sample(g), zero_like(forcings[0].sample(g, times)),
                                                      trivial_splits(zero_like(forcings[0].sample(g, times))), ctx);
        res.rows.push_back(make_row(homogeneous, "F=0 member=0", g, times[1] - times[0]));
        res.verdicts.push_back(check_finite("ensemble_max_ratio", "endpoint", detail::ensemble_max(reps)));
        res.verdicts.push_back(check_finite("homogeneous_ratio", "endpoint", homogeneous.ratio));
        detail::note_grid(res, g, sh);
        res.metadata["time_nodes"] = nodes;
        res.ensemble = detail::ensemble_json(es, cfg.seed, m, "data fields");
        res.ensemble["forcing_seed"] = forcing_seed;
        res.ensemble["splits"] = "all in Y, all in L^1 L^2, frequency thresholds 2^j for j in [-2, 2]";
    }
    {
        GroupTimer timer(res, "free");
        // plane wave e^{i xi.x} evolves by the phase e^{-i t |xi|^2}
        const Grid gp(n, 4.0, 16);
        std::vector<double> xi(static_cast<std::size_t>(n));
        const int pattern[3] = {1, 2, -1};
        double xi2 = 0.0;
        for (int j = 0; j < n; ++j) {
            xi[j] = gp.frequency_step() * pattern[j % 3];
            xi2 += xi[j] * xi[j];
        }
        const Field wave = Field::from_function(gp, [&](std::span<const double> x) {
            double ph = 0.0;
            for (int j = 0; j < n; ++j) ph += xi[j] * x[j];
            return std::polar(1.0, ph);
        });
        const double t = 0.3;
        const double phase_err = detail::max_abs_diff(free_propagate(wave, t), wave * std::polar(1.0, -t * xi2));
        res.rows.push_back({"plane_wave_error", "t=0.3", phase_err, 1e-12, phase_err / 1e-12, n, gp.points(), gp.half_width(), t});
        res.verdicts.push_back(check_lt("plane_wave_phase", "free", phase_err, 1e-12));

        const Grid gm(2, 4.0, 32);
        EnsembleSpec ms;
        ms.radius_min = 0.5;
        ms.radius_max = 2.0;
        Field u = draw_field(2, ms, cfg.seed).sample(gm);
        const double m0 = l2_norm(u);
        for (int i = 0; i < 1000; ++i) u = free_propagate(u, 0.01);
        const double drift = std::abs(l2_norm(u) - m0) / m0;
        res.rows.push_back({"mass_drift", "1000 steps", l2_norm(u), m0, drift, 2, gm.points(), gm.half_width(), 0.01});
        res.verdicts.push_back(check_lt("mass_drift_1000_steps", "free", drift, 1e-12));

        // u_t = i u_xx, u(0) = e^{-x^2/2}: u = (1 + 2it)^{-1/2} exp(-x^2 / (2 (1 + 2it)))
        const Grid g1(1, 20.0, 256);
        const double tg = 0.1;
        const Field f0 = Field::from_function(g1, [](std::span<const double> x) { return cplx(std::exp(-0.5 * x[0] * x[0])); });
        const Field exact = Field::from_function(g1, [&](std::span<const double> x) {
            const cplx z(1.0, 2 * tg);
            return std::exp(-x[0] * x[0] / (2.0 * z)) / std::sqrt(z);
        });
        const double gerr = detail::max_abs_diff(free_propagate(f0, tg), exact);
        res.rows.push_back({"gaussian_error", "t=0.1", gerr, 1e-6, gerr / 1e-6, 1, g1.points(), g1.half_width(), tg});
        res.verdicts.push_back(check_le("gaussian_closed_form", "free", gerr, 1e-6));

        if (n >= 2) {
            const Field f = draw_field(n, EnsembleSpec{}, cfg.seed + 1).sample(gp);
            const double rot = detail::max_abs_diff(swap_axes(free_propagate(f, 0.4), 0, 1), free_propagate(swap_axes(f, 0, 1), 0.4));
            res.rows.push_back({"rotation_error", "swap 0,1", rot, 1e-12, rot / 1e-12, n, gp.points(), gp.half_width(), 0.4});
            res.verdicts.push_back(check_le("axis_swap_equivariance", "free", rot, 1e-12));
        }
    }
    return res;
}

namespace detail {

inline std::optional<cplx> parse_lambda(const SuiteConfig& cfg) {
    if (!cfg.has("lambda")) return std::nullopt;
    const std::string s = cfg.text("lambda", "");
    const auto comma = s.find(',');
    if (comma == std::string::npos) return cplx(SuiteConfig::parse_real("lambda", s), 0.0);
    return cplx(SuiteConfig::parse_real("lambda", s.substr(0, comma)), SuiteConfig::parse_real("lambda", s.substr(comma + 1)));
}

inline Profile1D named_profile(const std::string& name) {
    if (name == "box") return Profile1D::box(0.0, 1.0);
    if (name == "packet") return Profile1D::packet(0.5, 0.3, 2.0, 1.0);
    if (name == "zero") return Profile1D::box(0.0, 1.0, 0.0);
    throw ConfigError("w", "expected box, packet or zero, got '" + name + "'");
}

} // namespace detail

inline SuiteResult run_resolvent_1d(const SuiteConfig& cfg) {
    auto res = detail::start("resolvent-1d");
    GroupTimer timer(res, "resolvent");
    const int cells = cfg.integer("cells", 2048);
    const std::size_t m = cfg.members(20);
    constexpr double bound_tol = 1e-6, closed_tol = 1e-6;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01;
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double re = (u01(rng) < 0.5 ? -1.0 : 1.0) * uniform(0.2, 3.0);
        const cplx lambda(re, uniform(-3.0, 3.0));
        std::vector<Profile1D> parts;
        const int kind = static_cast<int>(u01(rng) * 3);
        if (kind != 1) {
            const double a = uniform(-2.0, 1.0);
            parts.push_back(Profile1D::box(a, a + uniform(0.2, 2.0), cplx(uniform(-1, 1), uniform(-1, 1))));
        }
        if (kind != 0) parts.push_back(Profile1D::packet(uniform(-2.0, 2.0), uniform(0.2, 1.0), uniform(-4.0, 4.0), cplx(uniform(-1, 1), uniform(-1, 1))));
        const auto rep = verify_resolvent_1d(Profile1D::sum(parts), lambda, cells);
        res.rows.push_back(plain_row("resolvent_1d", "pair=" + std::to_string(i) + " lambda=" + format_number(lambda.real()) + "," +
                                                         format_number(lambda.imag()),
                                     rep.lhs, rep.rhs));
        worst = std::max(worst, rep.ratio);
    }
    res.verdicts.push_back(check_le("ensemble_max_ratio", "resolvent", worst, 1.0 + bound_tol, std::to_string(m) + " (w, lambda) pairs"));

    const double closed = 1.0 - std::exp(-1.0);
    const auto box = verify_resolvent_1d(Profile1D::box(0.0, 1.0), cplx(-1.0), cells);
    const auto mirror = verify_resolvent_1d(Profile1D::box(0.0, 1.0), cplx(1.0), cells);
    res.rows.push_back(plain_row("resolvent_1d", "box lambda=-1", box.lhs, box.rhs));
    res.rows.push_back(plain_row("resolvent_1d", "box lambda=1", mirror.lhs, mirror.rhs));
    res.verdicts.push_back(check_le("box_closed_form", "resolvent", std::abs(box.lhs - closed), closed_tol, "sup v = 1 - e^{-1}"));
    res.verdicts.push_back(check_le("mirror_symmetry", "resolvent", std::abs(mirror.lhs - box.lhs), closed_tol));
    const auto zero = verify_resolvent_1d(detail::named_profile("zero"), cplx(-1.0), cells);
    res.rows.push_back(plain_row("resolvent_1d", "zero profile", zero.lhs, zero.rhs));
    res.verdicts.push_back(check_le("zero_profile", "resolvent", zero.lhs, 0.0));

    const auto lambda = detail::parse_lambda(cfg);
    if (lambda || cfg.has("w")) {
        const cplx l = lambda.value_or(cplx(-1.0));
        if (l.real() == 0.0) throw ConfigError("lambda", "the real part must be nonzero");
        const auto rep = verify_resolvent_1d(detail::named_profile(cfg.text("w", "box")), l, cells);
        res.rows.push_back(plain_row("resolvent_1d", "requested w=" + cfg.text("w", "box") + " lambda=" + format_number(l.real()) + "," +
                                                         format_number(l.imag()),
                                     rep.lhs, rep.rhs));
        if (!rep.degenerate) res.verdicts.push_back(check_le("requested_ratio", "resolvent", rep.ratio, 1.0 + bound_tol));
        res.probes["requested_sup_v"] = rep.lhs;
    }
    res.metadata["cells"] = cells;
    res.metadata["quadrature"] = "Gauss-Legendre order 10 per cell, exact exponential recursion";
    res.ensemble = {{"kind", "box and packet profiles"}, {"members", m}, {"seed", cfg.seed}};
    return res;
}

inline SuiteResult run_resolvent_nd(const SuiteConfig& cfg) {
    auto res = detail::start("resolvent-nd");
    GroupTimer timer(res, "resolvent-nd");
    const int n = cfg.dimension(3), N = cfg.points(32);
    if (n < 2) throw ConfigError("dim", "the several-dimensional resolvent suite needs dim >= 2");
    const double L = cfg.real("half_width", 8.0);
    const Grid gc(n, L, N), gf(n, L, 2 * N);
    const std::size_t m = cfg.members(20);
    constexpr double half_bound = 0.5, bound_tol = 1e-6, refine_tol = 0.10;
    // Rectangle Re lambda in [-3, -0.5], Im lambda in [-1.5, 1.5], five columns.
    const std::size_t cols = 5, rows = std::max<std::size_t>(2, (m + cols - 1) / cols);
    std::vector<cplx> lambdas;
    for (std::size_t i = 0; i < m; ++i) {
        const double re = -3.0 + 2.5 * static_cast<double>(i % cols) / (cols - 1);
        const double im = -1.5 + 3.0 * static_cast<double>(i / cols) / static_cast<double>(rows - 1);
        lambdas.push_back({re, im});
    }
    EnsembleSpec es;
    es.radius_max = 3.0;
    const auto recipes = field_ensemble(n, es, cfg.seed, m);
    double maxima[2] = {0, 0};
    const Grid* grids[2] = {&gc, &gf};
    for (int gi = 0; gi < 2; ++gi) {
        const Grid& g = *grids[gi];
        const auto reps = parallel_map(m, cfg.parallel, [&](std::size_t i) { return verify_resolvent_nd(recipes[i].sample(g), lambdas[i]); });
        for (std::size_t i = 0; i < m; ++i)
            res.rows.push_back(make_row(reps[i],
                                        "N=" + std::to_string(g.points()) + " lambda=" + format_number(lambdas[i].real()) + "," +
                                            format_number(lambdas[i].imag()),
                                        g));
        maxima[gi] = detail::ensemble_max(reps);
        res.verdicts.push_back(check_le("ensemble_max_ratio_N=" + std::to_string(g.points()), "resolvent-nd", maxima[gi],
                                        half_bound * (1 + bound_tol), "decaying-kernel constant 1/2"));
        detail::note_grid(res, g, detail::spatial_fit(g));
    }
    res.verdicts.push_back(check_lt("refinement_change", "resolvent-nd", relative_change(maxima[1], maxima[0]), refine_tol));
    // separable field: Gaussian in x1 times one transverse Fourier mode, where the estimate is the fibre bound
    const double k = gc.frequency_step() * 2;
    const Field sep = Field::from_function(gc, [&](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2.0) * std::polar(1.0, k * x[n - 1]); });
    const auto rs = verify_resolvent_nd(sep, cplx(-1.0, 0.5));
    res.rows.push_back(make_row(rs, "separable lambda=-1,0.5", gc));
    res.verdicts.push_back(check_le("separable_matches_fibre", "resolvent-nd", std::abs(rs.ratio - rs.extras.at("fibre_ratio")), 1e-10 * rs.ratio));
    res.probes["ensemble_max"] = {maxima[0], maxima[1]};
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "fields");
    res.ensemble["lambda_rectangle"] = {{"re", {-3.0, -0.5}}, {"im", {-1.5, 1.5}}};
    return res;
}

inline SuiteResult run_mixed_norm(const SuiteConfig& cfg) {
    auto res = detail::start("mixed-norm");
    GroupTimer timer(res, "mixed");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Grid gc(n, L, N), gf(n, L, 2 * N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(gc));
    const NormContext cc(gc, sh), cf(gf, sh);
    const int nodes = cfg.integer("nodes", 17);
    const double T = cfg.real("horizon", 0.5);
    const auto times = linspace(0.0, T, static_cast<std::size_t>(nodes));
    const std::size_t m = cfg.members(20);
    EnsembleSpec es;
    es.radius_max = 3.0;
    es.horizon = T;
    const auto recipes = forcing_ensemble(n, es, cfg.seed, m);
    constexpr double refine_tol = 0.15;
    const char* keys[3] = {"ratio", "l1_chain", "sup_chain"};
    double maxima[2][3] = {{0, 0, 0}, {0, 0, 0}};
    const NormContext* ctxs[2] = {&cc, &cf};
    for (int gi = 0; gi < 2; ++gi) {
        const auto& ctx = *ctxs[gi];
        const auto reps = parallel_map(m, cfg.parallel, [&](std::size_t i) { return verify_mixed_norm(recipes[i].sample(ctx.grid(), times), ctx); });
        const std::string tag = "N=" + std::to_string(ctx.grid().points());
        for (std::size_t i = 0; i < m; ++i) {
            const auto& r = reps[i];
            const std::string id = tag + " member=" + std::to_string(i);
            res.rows.push_back(make_row(r, id, ctx.grid(), times[1] - times[0]));
            res.rows.push_back({"shell_l1_chain", id, r.extras.at("l1_chain"), 1.0, r.extras.at("l1_chain"), n, ctx.grid().points(), L, 0.0});
            res.rows.push_back({"shell_sup_chain", id, r.extras.at("sup_chain"), 1.0, r.extras.at("sup_chain"), n, ctx.grid().points(), L, 0.0});
            const double vals[3] = {r.degenerate ? 0.0 : r.ratio, r.extras.at("l1_chain"), r.extras.at("sup_chain")};
            for (int q = 0; q < 3; ++q) maxima[gi][q] = std::max(maxima[gi][q], vals[q]);
        }
        for (int q = 0; q < 3; ++q) res.verdicts.push_back(check_finite(std::string("ensemble_max_") + keys[q] + "_" + tag, "mixed", maxima[gi][q]));
        detail::note_grid(res, ctx.grid(), sh);
    }
    for (int q = 0; q < 3; ++q) {
        res.verdicts.push_back(check_lt(std::string("refinement_change_") + keys[q], "mixed", relative_change(maxima[1][q], maxima[0][q]), refine_tol));
        res.probes[std::string("ensemble_max_") + keys[q]] = {maxima[0][q], maxima[1][q]};
    }
    if (n >= 2) {
        const SpaceTimeField F = recipes[0].sample(gc, times);
        std::vector<Field> rot;
        for (const auto& s : F.slices) rot.push_back(swap_axes(s, 0, 1));
        const auto a = verify_mixed_norm(F, cc, 0);
        const auto b = verify_mixed_norm(SpaceTimeField(times, std::move(rot)), cc, 1);
        const double diff = std::abs(a.ratio - b.ratio) / a.ratio;
        res.rows.push_back(make_row(b, "axis swap 0,1 member=0", gc, times[1] - times[0]));
        res.verdicts.push_back(check_le("rotation_probe", "mixed", diff, 1e-12, "relative difference, floating-point summation order only"));
    }
    {
        // ball of radius 3: ||1_B||_{L^1_{x1} L^2} <= 2 sum_k || |x|^{1/2} Q_k 1_B ||
        const NormContext cb(gf, detail::spatial_fit(gf));
        const RVec r = gf.radii();
        Field ind(gf);
        for (std::size_t i = 0; i < r.size(); ++i) ind.samples[i] = r[i] <= 3.0 ? 1.0 : 0.0;
        const SpaceTimeField F(linspace(0.0, 1.0, 2), {ind, ind});
        double sum = 0.0;
        for (double v : detail::weighted_shell_norms(F, 0.5, cb)) sum += v;
        const double lhs = mixed_l1_l2(F, 0);
        res.rows.push_back({"ball_shell_chain", "radius 3", lhs, sum, lhs / sum, n, gf.points(), L, 0.0});
        res.verdicts.push_back(check_le("ball_shell_chain", "mixed", lhs / sum, 2.0));
    }
    res.metadata["time_nodes"] = nodes;
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "forcings");
    return res;
}

inline SuiteResult run_product_interp(const SuiteConfig& cfg) {
    auto res = detail::start("product-interp");
    GroupTimer timer(res, "product");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Grid gc(n, L, N), gf(n, L, 2 * N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(gc));
    const NormContext cc(gc, sh), cf(gf, sh);
    const std::size_t m = cfg.members(20);
    const EnsembleSpec es;
    const auto fs = field_ensemble(n, es, cfg.seed, m);
    const auto gs = field_ensemble(n, es, member_seed(cfg.seed, 1000003), m);
    constexpr double refine_tol = 0.15;
    const bool sobolev = n >= 2, hardy = n >= 3;
    struct Set {
        EstimateReport product, interp, sob, hardy;
    };
    std::vector<std::string> names{"product", "interpolation"};
    if (sobolev) names.push_back("sobolev");
    if (hardy) names.push_back("hardy");
    std::map<std::string, double> maxima[2];
    const NormContext* ctxs[2] = {&cc, &cf};
    for (int gi = 0; gi < 2; ++gi) {
        const auto& ctx = *ctxs[gi];
        const Grid& g = ctx.grid();
        const auto sets = parallel_map(m, cfg.parallel, [&](std::size_t i) {
            const Field f = fs[i].sample(g);
            Set s{product_estimate(f, gs[i].sample(g), ctx), interpolation_estimate(f, ctx), {}, {}};
            if (sobolev) s.sob = sobolev_embedding(f);
            if (hardy) s.hardy = hardy_inequality(f);
            return s;
        });
        const std::string tag = "N=" + std::to_string(g.points());
        for (std::size_t i = 0; i < m; ++i) {
            const auto& s = sets[i];
            std::vector<const EstimateReport*> reps{&s.product, &s.interp};
            if (sobolev) reps.push_back(&s.sob);
            if (hardy) reps.push_back(&s.hardy);
            for (std::size_t j = 0; j < reps.size(); ++j) {
                res.rows.push_back(make_row(*reps[j], tag + " member=" + std::to_string(i), g));
                maxima[gi][names[j]] = std::max(maxima[gi][names[j]], reps[j]->ratio);
            }
        }
        for (const auto& nm : names) res.verdicts.push_back(check_finite("ensemble_max_" + nm + "_" + tag, "product", maxima[gi][nm]));
        res.verdicts.push_back(check_le("interpolation_bound_" + tag, "product", maxima[gi]["interpolation"], 1.0 + 1e-12, "Cauchy-Schwarz constant 1"));
        if (hardy) res.verdicts.push_back(check_le("hardy_constant_" + tag, "product", maxima[gi]["hardy"], 2.0 / (n - 2), "sharp constant 2/(n-2)"));
        detail::note_grid(res, g, sh);
    }
    for (const auto& nm : names) {
        res.verdicts.push_back(check_lt("refinement_change_" + nm, "product", relative_change(maxima[1][nm], maxima[0][nm]), refine_tol));
        res.probes["ensemble_max_" + nm] = {maxima[0][nm], maxima[1][nm]};
    }
    // g = 1 on the support of f: the left side is exactly the first split term
    Field one(gc);
    for (auto& v : one.samples) v = 1.0;
    const auto base = product_estimate(fs[0].sample(gc), one, cc);
    res.rows.push_back(make_row(base, "g=1 member=0", gc));
    res.verdicts.push_back(check_le("unit_multiplier_baseline", "product", std::abs(base.lhs / base.extras.at("first_term") - 1.0), 1e-12));
    if (hardy) {
        const Field gauss = Field::from_function(gf, [](std::span<const double> x) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return cplx(std::exp(-0.5 * r2));
        });
        const auto hg = hardy_inequality(gauss);
        res.rows.push_back(make_row(hg, "gaussian", gf));
        res.verdicts.push_back(check_le("hardy_gaussian", "product", hg.ratio, hg.extras.at("constant")));
    }
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "field pairs");
    return res;
}

namespace detail {

inline Rational parse_rational(const std::string& key, const std::string& s) {
    try {
        const auto slash = s.find('/');
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const long v = std::stol(s, &used);
            if (used != s.size()) throw std::invalid_argument("trailing");
            return Rational(v, 1);
        }
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        const long num = std::stol(a, &used);
        if (used != a.size()) throw std::invalid_argument("trailing");
        const long den = std::stol(b, &used);
        if (used != b.size()) throw std::invalid_argument("trailing");
        if (den == 0) throw std::invalid_argument("zero");
        return Rational(num, den);
    } catch (const std::logic_error&) {
        throw ConfigError(key, "expected an integer or a fraction p/q, got '" + s + "'");
    }
}

} // namespace detail

inline SuiteResult run_semilinear(const SuiteConfig& cfg) {
    auto res = detail::start("semilinear");
    GroupTimer timer(res, "semilinear");
    const int n = cfg.dimension(3), N = cfg.points(32);
    const double L = cfg.real("half_width", 8.0);
    const Rational a = detail::parse_rational("a", cfg.text("a", "1"));
    const Rational pr = critical_exponent(n, a);
    const double p = pr.value();
    const Grid g(n, L, N);
    const ShellRange sh = cfg.shell_range(detail::spatial_fit(g));
    const NormContext ctx(g, sh);
    const DyadicDecomposition decomp(sh);
    const auto A = potential_with_audit(packet_potential(g, 1.0), decomp, cfg.real("audit", 0.08));
    const double audit = smallness_audit(A, decomp).total;
    const RVec V = gaussian_coefficient(g, cfg.real("v0", 4.0), cfg.real("width", 2.0));
    const int nodes = cfg.integer("nodes", 9);
    const auto times = linspace(0.0, cfg.real("horizon", 0.5), static_cast<std::size_t>(nodes));
    PicardOptions opt;
    opt.tol = cfg.real("tol", 1e-10);
    opt.max_iterations = cfg.integer("max_iterations", 60);
    const std::size_t m = cfg.members(4);
    const EnsembleSpec es;
    const auto recipes = field_ensemble(n, es, cfg.seed, m);
    const Field f0 = recipes[0].sample(g);
    auto scaled = [](const Field& f, double delta) { return f * cplx(delta / l2_norm(f)); };

    // Each member is bisected; the ensemble threshold is the smallest member threshold.
    const double lo = cfg.real("delta_lo", 0.1), hi = cfg.real("delta_hi", 100.0);
    const int bisections = cfg.integer("bisections", 8);
    const auto sweeps = parallel_map(m, cfg.parallel, [&](std::size_t i) {
        return delta_bisection(recipes[i].sample(g), V, p, A, times, ctx, lo, hi, bisections, opt);
    });
    double delta_star = kInf, below = 0.0;
    std::size_t critical = 0;
    json member_thresholds = json::array();
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<DeltaTrial> trials = sweeps[i].trials;
        std::sort(trials.begin(), trials.end(), [](const DeltaTrial& x, const DeltaTrial& y) { return x.delta < y.delta; });
        for (const auto& t : trials) {
            res.rows.push_back({"picard_contraction", "member=" + std::to_string(i) + " delta=" + format_number(t.delta) + " " + to_string(t.status),
                                t.max_contraction, 1.0, t.max_contraction, n, N, L, 0.0});
            if (t.delta <= sweeps[i].delta_star) below = std::max(below, t.contracting ? t.max_contraction : kInf);
        }
        member_thresholds.push_back({{"delta_star", sweeps[i].delta_star}, {"delta_fail", number_json(sweeps[i].delta_fail)}});
        if (sweeps[i].delta_star < delta_star) {
            delta_star = sweeps[i].delta_star;
            critical = i;
        }
    }
    const DeltaSweep& sweep = sweeps[critical];
    const Field fc = recipes[critical].sample(g);
    res.verdicts.push_back(check_gt("delta_star", "semilinear", delta_star, 0.0, "smallest member threshold"));
    res.verdicts.push_back(check_lt("contraction_below_delta_star", "semilinear", below, 1.0, "every probed amplitude at or below each member threshold"));
    res.probes["delta_star"] = delta_star;
    res.probes["delta_fail"] = number_json(sweep.delta_fail);
    res.probes["member_thresholds"] = member_thresholds;

    if (delta_star > 0.0) {
        const auto at_star = picard_solve(scaled(fc, delta_star), V, p, A, times, ctx, opt);
        res.rows.push_back({"picard_residual", "delta=delta_star", at_star.residual, opt.tol, at_star.residual / opt.tol, n, N, L, 0.0});
        res.verdicts.push_back(check_lt("converged_residual", "semilinear", at_star.residual, 10 * opt.tol));
        const auto yb = nonlinearity_y_bound(at_star.solution, V, p, ctx);
        res.rows.push_back(make_row(yb, "delta=delta_star", g));

        // One constant for ||Phi(u) - Phi(v)||_Z <= C (||u||_Z + ||v||_Z)^{p-1} ||u - v||_Z across members and amplitudes.
        const std::vector<double> fractions{0.125, 0.25, 0.5};
        const double spread_tol = 1.5;
        double c_max = 0.0, worst_spread = 0.0;
        bool all_converged = true;
        for (std::size_t i = 0; i < m; ++i) {
            double lo = kInf, hi = 0.0;
            for (double fr : fractions) {
                const auto r = picard_solve(scaled(recipes[i].sample(g), fr * delta_star), V, p, A, times, ctx, opt);
                all_converged = all_converged && r.status == PicardStatus::converged;
                res.rows.push_back({"difference_constant", "member=" + std::to_string(i) + " delta=" + format_number(fr) + "*delta_star " + to_string(r.status) + " iterations=" +
                                        std::to_string(r.history.size()),
                                    r.max_difference_constant, 1.0, r.max_difference_constant, n, N, L, 0.0});
                lo = std::min(lo, r.max_difference_constant);
                hi = std::max(hi, r.max_difference_constant);
            }
            c_max = std::max(c_max, hi);
            worst_spread = std::max(worst_spread, lo > 0.0 ? hi / lo : kInf);
        }
        res.verdicts.push_back(check_finite("ensemble_difference_constant", "semilinear", all_converged ? c_max : kInf));
        res.verdicts.push_back(check_le("difference_constant_uniformity", "semilinear", worst_spread, spread_tol,
                                        "max/min of the constant over amplitudes, worst member"));
        res.probes["difference_constant"] = c_max;
    }

    const RVec V0(g.size(), 0.0);
    const Field fz = scaled(f0, 1.0);
    const auto lin = picard_solve(fz, V0, p, A, times, ctx, opt);
    const auto ref = magnetic_solve(fz, {}, A, 0.0, times, opt.solver).solution;
    double diff = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) diff = std::max(diff, detail::max_abs_diff(lin.solution.slices[i], ref.slices[i]));
    res.rows.push_back({"zero_coefficient_difference", "V=0", diff, 0.0, std::nan(""), n, N, L, 0.0});
    res.verdicts.push_back(check_le("zero_coefficient_is_linear", "semilinear", diff, 0.0, std::to_string(lin.history.size()) + " iteration(s)"));

    detail::note_grid(res, g, sh);
    res.metadata["exponent"] = {{"a", a.str()}, {"p", pr.str()}};
    res.metadata["audit_total"] = audit;
    res.metadata["time_step"] = 0.5 * g.spacing() * g.spacing();
    res.metadata["coefficient"] = {{"v0", cfg.real("v0", 4.0)}, {"width", cfg.real("width", 2.0)}};
    res.metadata["picard"] = {{"tol", opt.tol}, {"max_iterations", opt.max_iterations}};
    res.ensemble = detail::ensemble_json(es, cfg.seed, m, "data fields");
    return res;
}

/// Runs one suite. Invalid parameters and unresolvable shell ranges surface as ConfigError naming the field.
inline SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg) {
    const SuiteInfo& info = find_suite(name);
    for (const auto& [key, value] : cfg.params)
        if (std::find(info.params.begin(), info.params.end(), key) == info.params.end())
            throw ConfigError(key, "not a parameter of suite '" + name + "'");
    if (cfg.parallel < 1) throw ConfigError("parallel", "must be >= 1");
    static const std::map<std::string, std::function<SuiteResult(const SuiteConfig&)>> table{
        {"partition", run_partition},
        {"equivalence", run_equivalence},
        {"phase-localization", run_phase_localization},
        {"commutator-scan", run_commutator_scan},
        {"discrete-bounds", run_discrete_bounds},
        {"kpv", run_kpv},
        {"main-estimate", run_main_estimate},
        {"endpoint", run_endpoint},
        {"resolvent-1d", run_resolvent_1d},
        {"resolvent-nd", run_resolvent_nd},
        {"mixed-norm", run_mixed_norm},
        {"product-interp", run_product_interp},
        {"semilinear", run_semilinear},
    };
    try {
        return table.at(name)(cfg);
    } catch (const RangeError& e) {
        throw ConfigError(cfg.shells ? "shells" : "grid", e.what());
    } catch (const DomainError& e) {
        throw ConfigError("parameters", e.what());
    }
}

} // namespace lpsmooth
