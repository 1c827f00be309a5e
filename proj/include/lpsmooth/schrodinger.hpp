#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "spectral.hpp"

namespace lpsmooth {

/// Phase multiplier e^{-i t |xi|^2} of the free flow d_t u = i Lap u.
inline std::vector<cplx> free_symbol(const Grid& g, double t) {
    const RVec r = g.frequency_radii();
    std::vector<cplx> sym(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) sym[i] = std::polar(1.0, -t * r[i] * r[i]);
    return sym;
}

/// Exact spectral free evolution over time t. The zero mode is kept (multiplier 1).
inline Field free_propagate(const Field& f, double t) { return apply_multiplier(f, free_symbol(f.grid, t)); }

/// Forcing term F(t) evaluated at arbitrary times; an empty function means F = 0.
using Forcing = std::function<Field(double)>;

inline Forcing forcing_from(const SpaceTimeField& F) {
    return [&F](double t) { return F.at(t); };
}

/// Spectral-state trapezoid Duhamel integrator: U <- e^{-i d |xi|^2}(U + d/2 F_i) + d/2 F_{i+1}.
class DuhamelStream {
public:
    DuhamelStream(const Grid& g, double t0, const Field& F0)
        : grid_(g), radii_sq_(g.frequency_radii()), t_(t0), state_(g.size(), cplx{}), last_(to_spectrum(F0)) {
        for (auto& r : radii_sq_) r *= r;
    }

    double time() const noexcept { return t_; }

    void advance(double t_next, const Field& F_next) {
        CVec next = to_spectrum(F_next);
        step_into(state_, t_next - t_, next);
        last_ = std::move(next);
        t_ = t_next;
    }

    /// Value at t >= time() using F(t) for the closing node, without advancing the state.
    Field peek(double t, const Field& F_t) const {
        if (t == t_) return from_spectrum(grid_, state_);
        CVec u = state_;
        const CVec next = to_spectrum(F_t);
        step_into(u, t - t_, next);
        return from_spectrum(grid_, std::move(u));
    }

    Field value() const { return from_spectrum(grid_, state_); }

private:
    void step_into(CVec& u, double d, const CVec& next) const {
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] = std::polar(1.0, -d * radii_sq_[i]) * (u[i] + 0.5 * d * last_[i]) + 0.5 * d * next[i];
    }

    Grid grid_;
    RVec radii_sq_;
    double t_;
    CVec state_;
    CVec last_;
};

inline void check_output_times(const std::vector<double>& t_out, double lo, double hi) {
    for (std::size_t i = 0; i < t_out.size(); ++i) {
        if (t_out[i] < lo - 1e-12 || t_out[i] > hi + 1e-12)
            throw DomainError("output time " + std::to_string(t_out[i]) + " outside the forcing span");
        if (i > 0 && !(t_out[i] > t_out[i - 1])) throw DomainError("output times must be strictly increasing");
    }
}

/// u(t) = int_{t0}^t e^{i(t-s) Lap} F(s) ds by the trapezoid rule on F's nodes, at each output time.
inline SpaceTimeField duhamel(const SpaceTimeField& F, const std::vector<double>& t_out) {
    F.validate();
    if (F.size() < 2) throw DomainError("duhamel needs at least two forcing slices");
    check_output_times(t_out, F.times.front(), F.times.back());
    DuhamelStream stream(F.grid(), F.times.front(), F.slices.front());
    std::size_t i = 0;
    std::vector<Field> out;
    for (double t : t_out) {
        while (i + 1 < F.size() && F.times[i + 1] <= t) {
            ++i;
            stream.advance(F.times[i], F.slices[i]);
        }
        out.push_back(t > stream.time() ? stream.peek(t, F.at(t)) : stream.value());
    }
    return SpaceTimeField(t_out, std::move(out));
}

/// Real vector potential A_j(t, x). Time dependence is optional and sampled per step.
struct MagneticPotential {
    Grid grid;
    std::vector<RVec> components;
    std::function<std::vector<RVec>(double)> sampler;

    static MagneticPotential zero(const Grid& g) {
        return {g, std::vector<RVec>(static_cast<std::size_t>(g.dim()), RVec(g.size(), 0.0)), {}};
    }
    static MagneticPotential from_components(const Grid& g, std::vector<RVec> comps) {
        if (static_cast<int>(comps.size()) != g.dim()) throw DomainError("potential needs one component per axis");
        for (const auto& c : comps)
            if (c.size() != g.size()) throw DomainError("potential component size does not match grid");
        return {g, std::move(comps), {}};
    }

    bool time_dependent() const noexcept { return static_cast<bool>(sampler); }
    std::vector<RVec> at(double t) const { return sampler ? sampler(t) : components; }

    bool is_zero() const {
        if (sampler) return false;
        for (const auto& c : components)
            for (double v : c)
                if (v != 0.0) return false;
        return true;
    }

    MagneticPotential scaled(double c) const {
        MagneticPotential out = *this;
        for (auto& comp : out.components)
            for (auto& v : comp) v *= c;
        if (sampler) {
            auto inner = sampler;
            out.sampler = [inner, c](double t) {
                auto comps = inner(t);
                for (auto& comp : comps)
                    for (auto& v : comp) v *= c;
                return comps;
            };
        }
        return out;
    }
};

/// W = |A|^2 - i div A at time t.
inline Field w_field(const MagneticPotential& A, double t = 0.0) {
    const auto comps = A.at(t);
    std::vector<Field> vec;
    Field w(A.grid);
    for (const auto& c : comps) {
        vec.push_back(Field::from_real(A.grid, c));
        for (std::size_t i = 0; i < c.size(); ++i) w.samples[i] += c[i] * c[i];
    }
    const Field div = divergence(vec);
    for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] -= cplx(0.0, 1.0) * cplx(div.samples[i].real(), 0.0);
    return w;
}

namespace detail {

inline double annulus_sup(const RVec& radii, const std::vector<double>& values, int k) {
    const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k + 1);
    double best = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (radii[i] >= lo && radii[i] <= hi) best = std::max(best, std::abs(values[i]));
    return best;
}

} // namespace detail

struct ShellAuditEntry {
    int k = 0;
    int component = 0;
    /// 2^k sup |A_j| on the annulus.
    double value_term = 0.0;
    /// 2^{2k} sup |d_i A_j| on the annulus, one per axis i.
    std::vector<double> gradient_terms;
    double total = 0.0;
};

struct SmallnessAudit {
    std::vector<ShellAuditEntry> shells;
    std::vector<double> component_totals;
    /// max_j sum_k sum_{|b| <= 1} 2^{k(1+|b|)} sup |D^b A_j|.
    double total = 0.0;
    double budget = 0.1;
    bool admissible() const noexcept { return total <= budget; }
};

/// Grid-max per annulus as the sup surrogate; spectral derivatives; sup over the sample times per shell.
inline SmallnessAudit smallness_audit(const MagneticPotential& A, const DyadicDecomposition& decomp,
                                      const std::vector<double>& times = {0.0}, double budget = 0.1) {
    SmallnessAudit audit;
    audit.budget = budget;
    const int n = A.grid.dim();
    const RVec radii = A.grid.radii();
    audit.component_totals.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<std::vector<ShellAuditEntry>> per(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        for (int k = decomp.k_min; k <= decomp.k_max; ++k)
            per[j].push_back({k, j, 0.0, std::vector<double>(static_cast<std::size_t>(n), 0.0), 0.0});
    for (double t : times) {
        const auto comps = A.at(t);
        for (int j = 0; j < n; ++j) {
            std::vector<double> vals(comps[j].begin(), comps[j].end());
            const auto grad = gradient(Field::from_real(A.grid, comps[j]));
            std::vector<std::vector<double>> gv;
            for (const auto& g : grad) {
                std::vector<double> r(g.size());
                for (std::size_t i = 0; i < r.size(); ++i) r[i] = g.samples[i].real();
                gv.push_back(std::move(r));
            }
            for (auto& e : per[j]) {
                e.value_term = std::max(e.value_term, std::ldexp(1.0, e.k) * detail::annulus_sup(radii, vals, e.k));
                for (int i = 0; i < n; ++i)
                    e.gradient_terms[i] = std::max(e.gradient_terms[i], std::ldexp(1.0, 2 * e.k) * detail::annulus_sup(radii, gv[i], e.k));
            }
        }
    }
    for (int j = 0; j < n; ++j)
        for (auto& e : per[j]) {
            e.total = e.value_term;
            for (double g : e.gradient_terms) e.total += g;
            audit.component_totals[j] += e.total;
            audit.shells.push_back(e);
        }
    audit.total = *std::max_element(audit.component_totals.begin(), audit.component_totals.end());
    return audit;
}

/// sum_k 2^{2k} sup_{annulus k} |W|.
inline double w_audit(const Field& W, const DyadicDecomposition& decomp) {
    const RVec radii = W.grid.radii();
    std::vector<double> mag(W.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(W.samples[i]);
    double acc = 0.0;
    for (int k = decomp.k_min; k <= decomp.k_max; ++k) acc += std::ldexp(1.0, 2 * k) * detail::annulus_sup(radii, mag, k);
    return acc;
}

/// Local part of i Lap_A - i Lap: A.grad u + div(A u) - i |A|^2 u (skew-adjoint for real A).
inline Field magnetic_local_term(const Field& u, const std::vector<RVec>& A) {
    const Grid& g = u.grid;
    const auto grad = gradient(u);
    std::vector<Field> au;
    Field out(g);
    for (int j = 0; j < g.dim(); ++j) {
        const RVec& a = A[static_cast<std::size_t>(j)];
        au.push_back(u * a);
        for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += a[i] * grad[j].samples[i] - cplx(0.0, a[i] * a[i]) * u.samples[i];
    }
    out += divergence(au);
    return out;
}

struct SolverOptions {
    /// Step size; 0 selects 0.5 h_x^2.
    double dt = 0.0;
    /// Local stages that grow the norm by more than this factor abort the run.
    double growth_limit = 1.1;
};

struct MagneticRun {
    SpaceTimeField solution;
    double step = 0.0;
    long steps = 0;
};

/// Strang splitting for d_t u = i Lap_A u + F: F half-kick, local half-step (explicit midpoint),
/// exact free step, local half-step, F half-kick.
inline MagneticRun magnetic_solve(const Field& f, const Forcing& F, const MagneticPotential& A, double t0,
                                  const std::vector<double>& t_out, const SolverOptions& opt = {}) {
    if (!(A.grid == f.grid)) throw DomainError("potential and data live on different grids");
    check_output_times(t_out, t0, t_out.empty() ? t0 : t_out.back());
    if (!t_out.empty() && t_out.front() < t0 - 1e-12) throw DomainError("output times precede the initial time");
    const Grid& g = f.grid;
    const double h = g.spacing();
    const double dt = opt.dt > 0.0 ? opt.dt : 0.5 * h * h;
    const bool local = !A.is_zero();
    RVec rsq = g.frequency_radii();
    for (auto& r : rsq) r *= r;

    Field u = f;
    double t = t0;
    long step_count = 0;
    double used = dt;
    auto half_local = [&](double at, double d) {
        const auto comps = A.at(at);
        const double before = l2_norm(u);
        Field mid = u + magnetic_local_term(u, comps) * cplx(0.5 * d);
        Field next = u + magnetic_local_term(mid, comps) * cplx(d);
        const double after = l2_norm(next);
        if (before > 0.0 && after > opt.growth_limit * before)
            throw StabilityError("local magnetic stage grew the solution by " + std::to_string(after / before) + " at step " +
                                     std::to_string(step_count) + "; reduce the step size",
                                 step_count);
        u = std::move(next);
    };
    std::vector<Field> out;
    for (double target : t_out) {
        const double span = target - t;
        if (span > 1e-14) {
            const long n_steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
            const double d = span / static_cast<double>(n_steps);
            used = d;
            for (long s = 0; s < n_steps; ++s) {
                const double tau = t;
                const double tn = (s + 1 == n_steps) ? target : t + d;
                if (F) u += F(tau) * cplx(0.5 * d);
                if (local) half_local(tau, 0.5 * d);
                CVec c = to_spectrum(u);
                for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -d * rsq[i]);
                u = from_spectrum(g, std::move(c));
                if (local) half_local(tn, 0.5 * d);
                if (F) u += F(tn) * cplx(0.5 * d);
                t = tn;
                ++step_count;
            }
        }
        out.push_back(u);
    }
    return {SpaceTimeField(t_out, std::move(out)), used, step_count};
}

/// Swaps two coordinate axes of a field (a rotation of the box).
inline Field swap_axes(const Field& f, int a, int b) {
    check_axis(f.grid, a);
    check_axis(f.grid, b);
    Field out(f.grid);
    const std::size_t sa = f.grid.stride(a), sb = f.grid.stride(b);
    for (std::size_t p = 0; p < f.size(); ++p) {
        const int ia = f.grid.axis_index(p, a), ib = f.grid.axis_index(p, b);
        const std::size_t q = p - ia * sa - ib * sb + ib * sa + ia * sb;
        out.samples[q] = f.samples[p];
    }
    return out;
}

} // namespace lpsmooth
