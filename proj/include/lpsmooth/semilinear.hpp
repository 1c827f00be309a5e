#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "harness.hpp"

namespace lpsmooth {

/// Exact rational number num / den with den > 0, kept reduced.
struct Rational {
    long num = 0;
    long den = 1;

    Rational() = default;
    Rational(long n, long d) : num(n), den(d) {
        if (d == 0) throw DomainError("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    bool operator==(const Rational&) const = default;
};

/// p = (n + 4) / (n + 2a) for a in [1, 2).
inline Rational critical_exponent(int n, Rational a) {
    if (n < 1) throw DomainError("dimension must be >= 1");
    if (a.value() < 1.0 || a.value() >= 2.0) throw DomainError("weight exponent a must lie in [1, 2), got " + a.str());
    return Rational((n + 4) * a.den, n * a.den + 2 * a.num);
}

/// V u |u|^{p-1}.
inline Field nonlinearity(const Field& u, const RVec& V, double p) {
    Field out(u.grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double m = std::abs(u.samples[i]);
        out.samples[i] = m > 0.0 ? V[i] * std::pow(m, p - 1.0) * u.samples[i] : cplx{};
    }
    return out;
}

inline SpaceTimeField nonlinearity(const SpaceTimeField& u, const RVec& V, double p) {
    std::vector<Field> s;
    for (const auto& x : u.slices) s.push_back(nonlinearity(x, V, p));
    return SpaceTimeField(u.times, std::move(s));
}

/// ||u||_Z = max(||u||_{L^inf L^2}, ||u||_{Y'}).
inline double z_norm(const SpaceTimeField& u, const NormContext& ctx) { return std::max(linf_l2(u), yprime_norm(u, ctx)); }

/// ||V u |u|^{p-1}||_Y against ||u||_Z^p.
inline EstimateReport nonlinearity_y_bound(const SpaceTimeField& u, const RVec& V, double p, const NormContext& ctx) {
    return make_report("nonlinearity_y", y_norm(nonlinearity(u, V, p), ctx), std::pow(z_norm(u, ctx), p));
}

/// V(x) = v0 exp(-|x|^2 / (2 w^2)).
inline RVec gaussian_coefficient(const Grid& g, double v0, double width) {
    RVec V = g.radii();
    for (auto& r : V) r = v0 * std::exp(-r * r / (2 * width * width));
    return V;
}

struct PicardOptions {
    int max_iterations = 60;
    /// Stop when ||u_{k+1} - u_k||_Z <= tol ||u_{k+1}||_Z.
    double tol = 1e-10;
    /// Divergence when ||u_k||_Z exceeds twice ||u_{k-window}||_Z.
    int divergence_window = 3;
    SolverOptions solver{};
};

enum class PicardStatus { converged, diverged, exhausted };

inline const char* to_string(PicardStatus s) {
    switch (s) {
    case PicardStatus::converged: return "converged";
    case PicardStatus::diverged: return "diverged";
    case PicardStatus::exhausted: return "exhausted";
    }
    return "?";
}

struct PicardStep {
    int k = 0;
    /// ||u_k||_Z.
    double z = 0.0;
    /// ||u_{k+1} - u_k||_Z.
    double increment = 0.0;
    /// increment_k / increment_{k-1}, 0 for the first step.
    double contraction = 0.0;
    /// increment_k / (increment_{k-1} (z_k + z_{k-1})^{p-1}), 0 when undefined.
    double difference_constant = 0.0;
};

struct PicardResult {
    PicardStatus status = PicardStatus::exhausted;
    std::vector<PicardStep> history;
    SpaceTimeField solution;
    /// ||Phi(u) - u||_Z / ||u||_Z for the returned iterate u.
    double residual = kInf;
    double max_contraction = 0.0;
    double max_difference_constant = 0.0;
};

/// Fixed-point map Phi(u): the magnetic solution with data f and forcing V u |u|^{p-1}.
inline SpaceTimeField picard_map(const SpaceTimeField& u, const Field& f, const RVec& V, double p, const MagneticPotential& A,
                                 const SolverOptions& opt) {
    const SpaceTimeField F = nonlinearity(u, V, p);
    return magnetic_solve(f, forcing_from(F), A, u.times.front(), u.times, opt).solution;
}

inline double z_distance(const SpaceTimeField& a, const SpaceTimeField& b, const NormContext& ctx) {
    SpaceTimeField d = a;
    for (std::size_t i = 0; i < d.size(); ++i) d.slices[i] -= b.slices[i];
    return z_norm(d, ctx);
}

/// Picard iteration u_{k+1} = Phi(u_k) from u_{-1} = 0 on the given time nodes.
inline PicardResult picard_solve(const Field& f, const RVec& V, double p, const MagneticPotential& A, const std::vector<double>& times,
                                 const NormContext& ctx, const PicardOptions& opt = {}) {
    if (times.size() < 2) throw DomainError("Picard iteration needs at least two time nodes");
    if (!(p >= 1.0)) throw DomainError("nonlinearity exponent must be >= 1");
    PicardResult res;
    SpaceTimeField u(times, std::vector<Field>(times.size(), Field(f.grid)));
    u = picard_map(u, f, V, p, A, opt.solver);
    std::vector<double> zs{z_norm(u, ctx)};
    double prev_inc = 0.0;
    for (int k = 0; k < opt.max_iterations; ++k) {
        SpaceTimeField next = picard_map(u, f, V, p, A, opt.solver);
        PicardStep step;
        step.k = k;
        step.z = zs.back();
        step.increment = z_distance(next, u, ctx);
        const double z_next = z_norm(next, ctx);
        if (k > 0 && prev_inc > 0.0) {
            step.contraction = step.increment / prev_inc;
            const double zz = zs[zs.size() - 1] + zs[zs.size() - 2];
            if (prev_inc > 1e-13 * zz) step.difference_constant = step.increment / (prev_inc * std::pow(zz, p - 1.0));
        }
        res.history.push_back(step);
        res.max_contraction = std::max(res.max_contraction, step.contraction);
        res.max_difference_constant = std::max(res.max_difference_constant, step.difference_constant);
        prev_inc = step.increment;
        u = std::move(next);
        zs.push_back(z_next);
        if (!std::isfinite(z_next)) {
            res.status = PicardStatus::diverged;
            break;
        }
        const std::size_t w = static_cast<std::size_t>(opt.divergence_window);
        if (zs.size() > w && z_next > 2.0 * zs[zs.size() - 1 - w]) {
            res.status = PicardStatus::diverged;
            break;
        }
        if (step.increment <= opt.tol * z_next) {
            res.status = PicardStatus::converged;
            break;
        }
    }
    if (res.status == PicardStatus::converged) {
        const double z = z_norm(u, ctx);
        res.residual = z > 0.0 ? z_distance(picard_map(u, f, V, p, A, opt.solver), u, ctx) / z : 0.0;
    }
    res.solution = std::move(u);
    return res;
}

/// A run contracts when it converged and every step shrank the increment.
inline bool contracting(const PicardResult& r) { return r.status == PicardStatus::converged && r.max_contraction < 1.0; }

struct DeltaTrial {
    double delta = 0.0;
    PicardStatus status = PicardStatus::exhausted;
    double max_contraction = 0.0;
    int iterations = 0;
    bool contracting = false;
};

struct DeltaSweep {
    /// Largest probed amplitude that contracted.
    double delta_star = 0.0;
    /// Smallest probed amplitude that failed to contract (inf if none did).
    double delta_fail = kInf;
    std::vector<DeltaTrial> trials;
};

/// Bisection in log(delta) on [lo, hi] for the contraction threshold of data delta f / ||f||.
inline DeltaSweep delta_bisection(const Field& f, const RVec& V, double p, const MagneticPotential& A, const std::vector<double>& times,
                                  const NormContext& ctx, double lo, double hi, int steps, const PicardOptions& opt = {}) {
    if (!(lo > 0.0 && hi > lo)) throw DomainError("delta bisection needs 0 < lo < hi");
    const double norm = l2_norm(f);
    if (!(norm > 0.0)) throw DomainError("delta bisection needs nonzero data");
    DeltaSweep sweep;
    auto probe = [&](double delta) {
        const auto r = picard_solve(f * cplx(delta / norm), V, p, A, times, ctx, opt);
        DeltaTrial t{delta, r.status, r.max_contraction, static_cast<int>(r.history.size()), contracting(r)};
        sweep.trials.push_back(t);
        if (t.contracting) {
            sweep.delta_star = std::max(sweep.delta_star, delta);
        } else {
            sweep.delta_fail = std::min(sweep.delta_fail, delta);
        }
        return t.contracting;
    };
    if (!probe(lo)) return sweep;
    if (probe(hi)) return sweep;
    double a = lo, b = hi;
    for (int i = 0; i < steps; ++i) {
        const double mid = std::sqrt(a * b);
        (probe(mid) ? a : b) = mid;
    }
    return sweep;
}

} // namespace lpsmooth
