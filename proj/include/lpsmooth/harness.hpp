#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gsl/gsl_integration.h>

#include "norms.hpp"
#include "schrodinger.hpp"

namespace lpsmooth {

/// One ratio LHS / RHS of a linear estimate together with named side measurements.
struct EstimateReport {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    /// Both sides vanish, so the ratio carries no information.
    bool degenerate = false;
    std::map<std::string, double> extras;
};

inline EstimateReport make_report(std::string id, double lhs, double rhs) {
    EstimateReport r;
    r.id = std::move(id);
    r.lhs = lhs;
    r.rhs = rhs;
    if (rhs > 0.0) {
        r.ratio = lhs / rhs;
    } else if (lhs == 0.0) {
        r.degenerate = true;
    } else {
        r.ratio = kInf;
    }
    return r;
}

struct EnsembleSummary {
    std::vector<EstimateReport> members;
    double max_ratio = 0.0;
    std::size_t argmax = 0;
    std::size_t degenerate = 0;
};

inline EnsembleSummary summarize(std::vector<EstimateReport> members) {
    EnsembleSummary s;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i].degenerate) {
            ++s.degenerate;
        } else if (members[i].ratio > s.max_ratio) {
            s.max_ratio = members[i].ratio;
            s.argmax = i;
        }
    }
    s.members = std::move(members);
    return s;
}

/// |a / b - 1|, treating two zeros as agreement.
inline double relative_change(double a, double b) {
    if (a == b) return 0.0;
    if (b == 0.0) return kInf;
    return std::abs(a / b - 1.0);
}

// Smoothing estimate: ||grad u||_{L^2_t N*} <= C ||F||_{L^2_t N}, u the Duhamel solution from zero data.

/// sup_k 2^{-k/2} ||grad f||_{L^2(annulus k)}, all components combined per annulus.
inline double gradient_dual_sup(const Field& f, const NormContext& ctx) {
    const auto grad = gradient(f);
    double best = 0.0;
    for (int k = ctx.shells().kmin; k <= ctx.shells().kmax; ++k) {
        const RVec w = ctx.annulus(k);
        double acc = 0.0;
        for (const auto& g : grad) {
            const double v = detail::weighted_l2(g, w);
            acc += v * v;
        }
        best = std::max(best, std::exp2(-0.5 * k) * std::sqrt(acc));
    }
    return best;
}

inline EstimateReport verify_kpv(const SpaceTimeField& F, const NormContext& ctx) {
    const SpaceTimeField u = duhamel(F, F.times);
    const double lhs = time_l2(u, [&](const Field& s) { return gradient_dual_sup(s, ctx); });
    const double rhs = time_l2(F, [&](const Field& s) { return n_norm(s, ctx); });
    return make_report("kpv", lhs, rhs);
}

// Main magnetic estimate:
// int (sup_k || |x|^{-1/2} Q_k u ||_{H^{1/2}})^2 dt <= C (||f||^2 + int (sum_k || |x|^{1/2} Q_k F ||_{H^{-1/2}})^2 dt).

inline constexpr NormSpec kMainSolutionSpec{kInf, -0.5, 0.5};
inline constexpr NormSpec kMainForcingSpec{1.0, 0.5, -0.5};

inline EstimateReport main_report(const Field& f, const SpaceTimeField& F, const SpaceTimeField& u, const NormContext& ctx) {
    const double l = time_l2(u, [&](const Field& s) { return lqa_sobolev_norm(s, kMainSolutionSpec, Variant::weight_product, ctx).value; });
    const double r = time_l2(F, [&](const Field& s) { return lqa_sobolev_norm(s, kMainForcingSpec, Variant::weight_product, ctx).value; });
    const double f2 = l2_norm(f);
    EstimateReport rep = make_report("main", l * l, f2 * f2 + r * r);
    rep.extras["data_term"] = f2 * f2;
    rep.extras["forcing_term"] = r * r;
    return rep;
}

/// e^{i(t - t0) Lap} f + Duhamel term of F, at F's nodes.
inline SpaceTimeField free_solution(const Field& f, const SpaceTimeField& F) {
    SpaceTimeField u = duhamel(F, F.times);
    for (std::size_t i = 0; i < u.size(); ++i) u.slices[i] += free_propagate(f, F.times[i] - F.times.front());
    return u;
}

inline EstimateReport verify_main(const Field& f, const SpaceTimeField& F, const MagneticPotential& A, const NormContext& ctx,
                                  const SolverOptions& opt = {}) {
    const auto run = magnetic_solve(f, forcing_from(F), A, F.times.front(), F.times, opt);
    EstimateReport rep = main_report(f, F, run.solution, ctx);
    rep.extras["audit"] = smallness_audit(A, DyadicDecomposition(ctx.shells()), {F.times.front()}).total;
    rep.extras["steps"] = static_cast<double>(run.steps);
    return rep;
}

/// Same report from the exact free pipeline (A = 0).
inline EstimateReport verify_main_free(const Field& f, const SpaceTimeField& F, const NormContext& ctx) {
    return main_report(f, F, free_solution(f, F), ctx);
}

/// Smooth localized potential A_j = c exp(-|x - x_j|^2 / 2) with one offset centre per component.
inline MagneticPotential packet_potential(const Grid& g, double c, double offset = 2.5) {
    std::vector<RVec> comps;
    for (int j = 0; j < g.dim(); ++j) {
        RVec a(g.size());
        const RVec r = g.radii();
        for (std::size_t p = 0; p < a.size(); ++p) {
            double d2 = 0.0;
            for (int i = 0; i < g.dim(); ++i) {
                const double centre = i == j ? offset : (i == (j + 1) % g.dim() ? -0.5 * offset : 0.0);
                const double x = g.coordinate(g.axis_index(p, i)) - centre;
                d2 += x * x;
            }
            a[p] = c * std::exp(-d2 / 2.0);
        }
        comps.push_back(std::move(a));
    }
    return MagneticPotential::from_components(g, std::move(comps));
}

/// The same potential rescaled so its smallness audit equals `target`.
inline MagneticPotential potential_with_audit(const MagneticPotential& A, const DyadicDecomposition& d, double target) {
    const double a = smallness_audit(A, d).total;
    if (!(a > 0.0)) throw DomainError("cannot rescale a vanishing potential");
    return A.scaled(target / a);
}

// Endpoint free estimate:
// ||u||_{L^inf L^2} + ||u||_{Y'} <= C (||f||_{L^2} + inf over F = F1 + F2 of ||F1||_Y + ||F2||_{L^1 L^2}).

struct ForcingSplit {
    std::string label;
    SpaceTimeField y_part;
    SpaceTimeField l1_part;
};

inline SpaceTimeField zero_like(const SpaceTimeField& F) {
    std::vector<Field> z(F.size(), Field(F.grid()));
    return SpaceTimeField(F.times, std::move(z));
}

/// chi(|D| / 2^j) F, chi the smooth step from 1 on [0, 1] to 0 on [2, inf).
inline SpaceTimeField low_pass(const SpaceTimeField& F, int j) {
    RVec sym = F.grid().frequency_radii();
    for (auto& r : sym) r = BumpProfile::step(std::ldexp(r, -j));
    std::vector<Field> out;
    for (const auto& s : F.slices) out.push_back(apply_multiplier(s, sym));
    return SpaceTimeField(F.times, std::move(out));
}

/// All of F in one space or the other.
inline std::vector<ForcingSplit> trivial_splits(const SpaceTimeField& F) {
    return {{"all_y", F, zero_like(F)}, {"all_l1", zero_like(F), F}};
}

/// High frequencies |xi| >~ 2^j into Y, the low part into L^1 L^2, for j in [jmin, jmax].
inline std::vector<ForcingSplit> threshold_splits(const SpaceTimeField& F, int jmin, int jmax) {
    std::vector<ForcingSplit> out;
    for (int j = jmin; j <= jmax; ++j) {
        SpaceTimeField low = low_pass(F, j);
        SpaceTimeField high = F;
        for (std::size_t i = 0; i < high.size(); ++i) high.slices[i] -= low.slices[i];
        out.push_back({"threshold_" + std::to_string(j), std::move(high), std::move(low)});
    }
    return out;
}

inline EstimateReport verify_free_endpoint(const Field& f, const SpaceTimeField& F, const std::vector<ForcingSplit>& splits,
                                           const NormContext& ctx) {
    if (splits.empty()) throw DomainError("endpoint estimate needs at least one forcing split");
    const SpaceTimeField u = free_solution(f, F);
    const double lhs = linf_l2(u) + yprime_norm(u, ctx);
    double best = kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        const double v = y_norm(splits[i].y_part, ctx) + l1_l2(splits[i].l1_part);
        if (v < best) {
            best = v;
            arg = i;
        }
    }
    EstimateReport rep = make_report("endpoint", lhs, l2_norm(f) + best);
    rep.extras["split_index"] = static_cast<double>(arg);
    rep.extras["forcing_term"] = best;
    return rep;
}

// One-dimensional resolvent: v = (d/dx - lambda)^{-1} w, ||v||_inf <= ||w||_1 for Re lambda != 0.

/// Compactly supported profile on [lo, hi]; `breaks` are interior points where w may be discontinuous.
struct Profile1D {
    std::function<cplx(double)> w;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> breaks;
    std::string label;

    static Profile1D box(double a, double b, cplx height = 1.0) {
        return {[height](double) { return height; }, a, b, {}, "box"};
    }
    /// Gaussian packet truncated at 8 widths.
    static Profile1D packet(double centre, double width, double carrier, cplx amplitude) {
        auto fn = [=](double x) {
            const double d = (x - centre) / width;
            return amplitude * std::exp(-0.5 * d * d) * std::polar(1.0, carrier * x);
        };
        return {fn, centre - 8 * width, centre + 8 * width, {}, "packet"};
    }
    /// Sum of profiles; the support is the union hull and every endpoint becomes a breakpoint.
    static Profile1D sum(const std::vector<Profile1D>& parts) {
        if (parts.empty()) throw DomainError("empty profile sum");
        Profile1D out;
        out.lo = parts.front().lo;
        out.hi = parts.front().hi;
        for (const auto& p : parts) {
            out.lo = std::min(out.lo, p.lo);
            out.hi = std::max(out.hi, p.hi);
        }
        for (const auto& p : parts) {
            for (double b : {p.lo, p.hi})
                if (b > out.lo && b < out.hi) out.breaks.push_back(b);
            for (double b : p.breaks) out.breaks.push_back(b);
        }
        out.w = [parts](double x) {
            cplx acc{};
            for (const auto& p : parts)
                if (x >= p.lo && x <= p.hi) acc += p.w(x);
            return acc;
        };
        out.label = "sum";
        return out;
    }
};

struct Resolvent1D {
    std::vector<double> x;
    std::vector<cplx> v;
    double sup_v = 0.0;
    double l1_w = 0.0;
    /// Kernel integrates from -inf (Re lambda <= 0) or from +inf (Re lambda > 0).
    bool forward = true;
};

namespace detail {

struct GlTableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

/// Cell edges: the support split at every breakpoint, each piece cut into uniform cells of width <= h.
inline std::vector<double> cell_edges(const Profile1D& p, int cells) {
    std::vector<double> knots{p.lo, p.hi};
    for (double b : p.breaks)
        if (b > p.lo && b < p.hi) knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const double h = (p.hi - p.lo) / cells;
    std::vector<double> edges{knots.front()};
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double len = knots[i] - knots[i - 1];
        const int n = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
        for (int j = 1; j <= n; ++j) edges.push_back(j == n ? knots[i] : knots[i - 1] + len * j / n);
    }
    return edges;
}

} // namespace detail

/// Exact-exponential cell recursion with Gauss-Legendre integrals of the forcing on each cell.
inline Resolvent1D solve_resolvent_1d(const Profile1D& p, cplx lambda, int cells = 2048, std::size_t order = 10) {
    if (!(p.hi > p.lo)) throw DomainError("profile support must have positive length");
    if (cells < 1) throw DomainError("resolvent needs at least one cell");
    std::unique_ptr<gsl_integration_glfixed_table, detail::GlTableDeleter> table(gsl_integration_glfixed_table_alloc(order));
    Resolvent1D out;
    out.forward = lambda.real() <= 0.0;
    out.x = detail::cell_edges(p, cells);
    const std::size_t n = out.x.size();
    out.v.assign(n, cplx{});
    // int_a^b e^{lambda (anchor - y)} w(y) dy
    auto cell = [&](double a, double b, double anchor) {
        cplx acc{};
        for (std::size_t i = 0; i < order; ++i) {
            double y = 0.0, wt = 0.0;
            gsl_integration_glfixed_point(a, b, i, &y, &wt, table.get());
            const cplx wy = p.w(y);
            acc += wt * std::exp(lambda * (anchor - y)) * wy;
            out.l1_w += wt * std::abs(wy);
        }
        return acc;
    };
    if (out.forward) {
        for (std::size_t i = 0; i + 1 < n; ++i)
            out.v[i + 1] = std::exp(lambda * (out.x[i + 1] - out.x[i])) * out.v[i] + cell(out.x[i], out.x[i + 1], out.x[i + 1]);
    } else {
        for (std::size_t i = n - 1; i > 0; --i)
            out.v[i - 1] = std::exp(-lambda * (out.x[i] - out.x[i - 1])) * out.v[i] - cell(out.x[i - 1], out.x[i], out.x[i - 1]);
    }
    for (const auto& v : out.v) out.sup_v = std::max(out.sup_v, std::abs(v));
    return out;
}

inline EstimateReport verify_resolvent_1d(const Profile1D& w, cplx lambda, int cells = 2048) {
    if (lambda.real() == 0.0) throw DomainError("one-dimensional resolvent bound needs Re lambda != 0");
    const auto r = solve_resolvent_1d(w, lambda, cells);
    EstimateReport rep = make_report("resolvent_1d", r.sup_v, r.l1_w);
    rep.extras["lambda_re"] = lambda.real();
    rep.extras["lambda_im"] = lambda.imag();
    rep.extras["forward"] = r.forward ? 1.0 : 0.0;
    return rep;
}

// n-dimensional resolvent: ||d_1 v||_{L^inf_{x1} L^2_{x'}} <= C ||(-Lap - lambda) v||_{L^1_{x1} L^2_{x'}}.

namespace detail {

/// Per-x1 slice L^2_{x'} norms of a field (slices are contiguous in row-major order).
inline std::vector<double> slice_norms(const Field& f) {
    const Grid& g = f.grid;
    const std::size_t block = f.size() / static_cast<std::size_t>(g.points());
    const double dv = std::pow(g.spacing(), g.dim() - 1);
    std::vector<double> out(static_cast<std::size_t>(g.points()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < block; ++j) acc += std::norm(f.samples[i * block + j]);
        out[i] = std::sqrt(acc * dv);
    }
    return out;
}

/// Transform in x' only, slice by slice.
inline CVec partial_transform(const Field& f) {
    CVec c = f.samples;
    const std::vector<int> shape(static_cast<std::size_t>(f.grid.dim() - 1), f.grid.points());
    fft_forward_batch(c.data(), shape, f.grid.points());
    return c;
}

} // namespace detail

inline EstimateReport verify_resolvent_nd(const Field& v, cplx lambda) {
    const Grid& g = v.grid;
    if (g.dim() < 2) throw DomainError("n-dimensional resolvent needs n >= 2");
    RVec r2 = g.frequency_radii();
    std::vector<cplx> sym(r2.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = r2[i] * r2[i] - lambda;
    const Field w = apply_multiplier(v, sym);
    const Field d1 = derivative(v, 0);
    const auto dn = detail::slice_norms(d1);
    const auto wn = detail::slice_norms(w);
    double lhs = 0.0, rhs = 0.0;
    for (double x : dn) lhs = std::max(lhs, x);
    for (double x : wn) rhs += x * g.spacing();
    EstimateReport rep = make_report("resolvent_nd", lhs, rhs);

    // fibrewise one-dimensional bounds after transforming in x'
    const CVec dt = detail::partial_transform(d1), wt = detail::partial_transform(w);
    const std::size_t block = v.size() / static_cast<std::size_t>(g.points());
    std::vector<double> sup(block, 0.0), l1(block, 0.0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(g.points()); ++i)
        for (std::size_t j = 0; j < block; ++j) {
            sup[j] = std::max(sup[j], std::abs(dt[i * block + j]));
            l1[j] += std::abs(wt[i * block + j]) * g.spacing();
        }
    const double peak = *std::max_element(l1.begin(), l1.end());
    double fibre = 0.0;
    for (std::size_t j = 0; j < block; ++j)
        if (l1[j] > 1e-10 * peak) fibre = std::max(fibre, sup[j] / l1[j]);
    rep.extras["fibre_ratio"] = fibre;
    rep.extras["lambda_re"] = lambda.real();
    rep.extras["lambda_im"] = lambda.imag();
    return rep;
}

// Mixed-norm smoothing: ||d_j u||_{L^inf_{x_j} L^2_{t, x'}} <= C ||F||_{L^1_{x_j} L^2_{t, x'}}.

namespace detail {

/// (int |F|^2 dt dx')^{1/2} as a function of x_axis.
inline std::vector<double> axis_profile(const SpaceTimeField& F, int axis) {
    const Grid& g = F.grid();
    check_axis(g, axis);
    const auto w = trapezoid_weights(F.times);
    const double dv = std::pow(g.spacing(), g.dim() - 1);
    std::vector<double> acc(static_cast<std::size_t>(g.points()), 0.0);
    for (std::size_t t = 0; t < F.size(); ++t)
        for (std::size_t p = 0; p < g.size(); ++p)
            acc[static_cast<std::size_t>(g.axis_index(p, axis))] += w[t] * std::norm(F.slices[t].samples[p]);
    for (auto& a : acc) a = std::sqrt(a * dv);
    return acc;
}

/// (int || r^a Q_k F ||^2 dt)^{1/2} per shell.
inline std::vector<double> weighted_shell_norms(const SpaceTimeField& F, double a, const NormContext& ctx) {
    std::vector<double> out;
    const auto tw = trapezoid_weights(F.times);
    for (int k = ctx.shells().kmin; k <= ctx.shells().kmax; ++k) {
        RVec w = ctx.masks()[k];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= ctx.radii()[i] > 0.0 ? std::pow(ctx.radii()[i], a) : 0.0;
        double acc = 0.0;
        for (std::size_t t = 0; t < F.size(); ++t) {
            const double v = weighted_l2(F.slices[t], w);
            acc += tw[t] * v * v;
        }
        out.push_back(std::sqrt(acc));
    }
    return out;
}

} // namespace detail

inline double mixed_linf_l2(const SpaceTimeField& F, int axis) {
    const auto p = detail::axis_profile(F, axis);
    return *std::max_element(p.begin(), p.end());
}

inline double mixed_l1_l2(const SpaceTimeField& F, int axis) {
    double acc = 0.0;
    for (double v : detail::axis_profile(F, axis)) acc += v * F.grid().spacing();
    return acc;
}

/// Also records the two shell comparisons the estimate factors through:
/// l1_chain = ||F||_{L^1_{x_j} L^2} / sum_k || |x|^{1/2} Q_k F ||_{L^2_{t,x}},
/// sup_chain = sup_k || |x|^{-1/2} Q_k d_j u ||_{L^2_{t,x}} / ||d_j u||_{L^inf_{x_j} L^2}.
inline EstimateReport verify_mixed_norm(const SpaceTimeField& F, const NormContext& ctx, int axis = 0) {
    const SpaceTimeField u = duhamel(F, F.times);
    std::vector<Field> d;
    for (const auto& s : u.slices) d.push_back(derivative(s, axis));
    const SpaceTimeField du(u.times, std::move(d));
    const double lhs = mixed_linf_l2(du, axis);
    const double rhs = mixed_l1_l2(F, axis);
    EstimateReport rep = make_report("mixed_norm", lhs, rhs);
    double shell_sum = 0.0, shell_sup = 0.0;
    for (double v : detail::weighted_shell_norms(F, 0.5, ctx)) shell_sum += v;
    for (double v : detail::weighted_shell_norms(du, -0.5, ctx)) shell_sup = std::max(shell_sup, v);
    rep.extras["l1_chain"] = shell_sum > 0.0 ? rhs / shell_sum : 0.0;
    rep.extras["sup_chain"] = lhs > 0.0 ? shell_sup / lhs : 0.0;
    return rep;
}

// Product, interpolation, Sobolev and Hardy inequalities in the dyadic spaces.

/// (sum_k (2^{ka} ||Q_k f||_{L^inf})^q)^{1/q}.
inline double lqa_linf_norm(const Field& f, double q, double a, const NormContext& ctx) {
    std::vector<double> terms;
    for (int k = ctx.shells().kmin; k <= ctx.shells().kmax; ++k) {
        const RVec& m = ctx.masks()[k];
        double peak = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) peak = std::max(peak, m[i] * std::abs(f.samples[i]));
        terms.push_back(std::exp2(k * a) * peak);
    }
    return detail::lq_of_terms(terms, q);
}

inline Field pointwise_product(const Field& f, const Field& g) {
    Field out = f;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] *= g.samples[i];
    return out;
}

/// s = 1/2, q = 2, a = 1/2 with the split (q1, a1) = (2, 1/2), (q2, a2) = (inf, 0) and its mirror:
/// ||fg|| <= C (||f||_{l^{2,1/2} H^{1/2}} ||g||_{l^{inf,0} L^inf} + ||f||_{l^{inf,0} L^inf} ||g||_{l^{2,1/2} H^{1/2}}).
inline EstimateReport product_estimate(const Field& f, const Field& g, const NormContext& ctx) {
    const NormSpec sob{2.0, 0.5, 0.5};
    auto hs = [&](const Field& x) { return lqa_sobolev_norm(x, sob, Variant::D_then_mask, ctx).value; };
    const double lhs = hs(pointwise_product(f, g));
    const double first = hs(f) * lqa_linf_norm(g, kInf, 0.0, ctx);
    const double second = lqa_linf_norm(f, kInf, 0.0, ctx) * hs(g);
    EstimateReport rep = make_report("product", lhs, first + second);
    rep.extras["first_term"] = first;
    rep.extras["second_term"] = second;
    return rep;
}

/// theta = 1/2: ||f||_{l^{2,1/2} H^{1/2}} <= C ||f||^{1/2}_{l^{2,1/2} H^1} ||f||^{1/2}_{l^{2,1/2} L^2}.
inline EstimateReport interpolation_estimate(const Field& f, const NormContext& ctx) {
    auto norm = [&](double s) { return lqa_sobolev_norm(f, NormSpec{2.0, 0.5, s}, Variant::D_then_mask, ctx).value; };
    return make_report("interpolation", norm(0.5), std::sqrt(norm(1.0) * norm(0.0)));
}

/// ||f||_{L^{2n/(n-1)}} against ||f||_{H^{1/2}}.
inline EstimateReport sobolev_embedding(const Field& f) {
    const int n = f.grid.dim();
    if (n < 2) throw DomainError("Sobolev embedding of H^{1/2} needs n >= 2");
    return make_report("sobolev", lp_norm(f, 2.0 * n / (n - 1)), sobolev_norm(f, 0.5));
}

namespace detail {

/// Average of |y|^{-2} over the unit cube centred at `offset`, by the midpoint rule on m^n sub-cells.
/// The cube at the origin uses self-similarity: I = I(outer part) / (1 - 2^{2-n}), the inner half-size cube excluded.
inline double unit_cell_inverse_square(const std::vector<int>& offset, int m) {
    const int n = static_cast<int>(offset.size());
    const bool origin = std::all_of(offset.begin(), offset.end(), [](int o) { return o == 0; });
    if (origin) m = 4 * ((m + 3) / 4);
    std::vector<int> idx(offset.size(), 0);
    const double h = 1.0 / m;
    double acc = 0.0;
    for (;;) {
        double r2 = 0.0;
        bool inner = origin;
        for (int d = 0; d < n; ++d) {
            const int i = idx[static_cast<std::size_t>(d)];
            const double y = offset[static_cast<std::size_t>(d)] - 0.5 + (i + 0.5) * h;
            r2 += y * y;
            inner = inner && i >= m / 4 && i < 3 * m / 4;
        }
        if (!inner) acc += 1.0 / r2;
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == m) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == n) break;
    }
    acc *= std::pow(h, n);
    return origin ? acc / (1.0 - std::exp2(2 - n)) : acc;
}

} // namespace detail

/// || f / |x| ||_{L^2} against ||grad f||_{L^2} (constant 2 / (n - 2)).
/// Cells within `near` lattice steps of the origin use the exact cell average of |x|^{-2}.
inline EstimateReport hardy_inequality(const Field& f, int near = 3) {
    const Grid& g = f.grid;
    const int n = g.dim();
    if (n < 3) throw DomainError("Hardy inequality needs n >= 3");
    const int sub = n == 3 ? 24 : 6;
    const int centre = g.points() / 2;
    const double h = g.spacing();
    std::map<std::vector<int>, double> cache;
    const RVec r = g.radii();
    double acc = 0.0;
    std::vector<int> off(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < r.size(); ++i) {
        bool close = true;
        for (int d = 0; d < n; ++d) {
            off[static_cast<std::size_t>(d)] = std::abs(g.axis_index(i, d) - centre);
            close = close && off[static_cast<std::size_t>(d)] <= near;
        }
        double w = 0.0;
        if (close) {
            std::vector<int> key = off;
            std::sort(key.begin(), key.end());
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, detail::unit_cell_inverse_square(key, sub)).first;
            w = it->second / (h * h);
        } else {
            w = 1.0 / (r[i] * r[i]);
        }
        acc += std::norm(f.samples[i]) * w * g.cell_volume();
    }
    EstimateReport rep = make_report("hardy", std::sqrt(acc), sobolev_norm(f, 1.0));
    rep.extras["constant"] = 2.0 / (n - 2);
    return rep;
}

} // namespace lpsmooth
