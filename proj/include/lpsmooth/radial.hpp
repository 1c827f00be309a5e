#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include "dyadic.hpp"
#include "fft.hpp"
#include "power_iteration.hpp"

namespace lpsmooth {

/// log Gamma(z) for complex z (principal branch via GSL).
inline cplx lgamma_complex(cplx z) {
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    gsl_sf_result lnr, arg;
    const int status = gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
    if (status != GSL_SUCCESS) throw DomainError("complex log-gamma failed at z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    return {lnr.val, arg.val};
}

/// Mellin symbol of |D|^s on degree-l harmonics: |D|^s (r^{-lambda} Y_l) = K r^{-lambda-s} Y_l.
inline cplx fractional_mellin_symbol(int n, int ell, cplx lambda, double s) {
    const double l = ell;
    const cplx v = lgamma_complex((l + lambda + s) / 2.0) + lgamma_complex((l + n - lambda) / 2.0) -
                   lgamma_complex((l + lambda) / 2.0) - lgamma_complex((l + n - lambda - s) / 2.0);
    return std::exp2(s) * std::exp(v);
}

/// Log-radial discretisation: t = ln r sampled with `points_per_octave` nodes per factor 2, `size` nodes total.
struct RadialGrid {
    int points_per_octave = 64;
    int size = 8192;
    double step() const noexcept { return std::numbers::ln2 / points_per_octave; }
};

/// Channel samples with the in-place scaling the power iteration needs.
struct ChannelVec {
    CVec v;
    ChannelVec& operator*=(double c) {
        for (auto& x : v) x *= c;
        return *this;
    }
};

inline double channel_norm(const ChannelVec& g) {
    double acc = 0.0;
    for (const auto& x : g.v) acc += std::norm(x);
    return std::sqrt(acc);
}

/// Q_k |D|^{-s} Q_m |D|^s restricted to the degree-l spherical harmonics, acting on G(t) = e^{nt/2} g(e^t).
/// In these coordinates |D|^s = e^{-st} m_s(D_t), so the operator is q_k e^{st} M_{-s} q_m e^{-st} M_s.
class RadialCommutator {
public:
    RadialCommutator(int n, int ell, int k, int m, double s, RadialGrid rg = {}, BumpProfile profile = {})
        : n_(n), ell_(ell), k_(k), m_(m), s_(s), rg_(rg) {
        if (n < 1) throw DomainError("dimension must be >= 1");
        if (!(std::abs(s) < 1.0)) throw DomainError("commutator needs |s| < 1");
        if (ell < 0) throw DomainError("harmonic degree must be >= 0");
        const int M = rg.size;
        const double h = rg.step();
        const double centre = 0.5 * (k + m) * std::numbers::ln2;
        wk_.resize(static_cast<std::size_t>(M));
        wm_.resize(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) {
            const double t = centre + (i - M / 2) * h;
            const double r = std::exp(t);
            wk_[static_cast<std::size_t>(i)] = profile(r / std::ldexp(1.0, k)) * std::exp(s * t);
            wm_[static_cast<std::size_t>(i)] = profile(r / std::ldexp(1.0, m)) * std::exp(-s * t);
        }
        plus_ = multiplier(n, ell, s, rg);
        minus_ = multiplier(n, ell, -s, rg);
    }

    ChannelVec apply(const ChannelVec& g) const {
        ChannelVec out = g;
        spectral(out.v, *plus_, false);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= wm_[i];
        spectral(out.v, *minus_, false);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= wk_[i];
        return out;
    }

    ChannelVec adjoint(const ChannelVec& g) const {
        ChannelVec out = g;
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= wk_[i];
        spectral(out.v, *minus_, true);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= wm_[i];
        spectral(out.v, *plus_, true);
        return out;
    }

    PowerResult norm(const PowerOptions& opt, std::uint64_t seed) const {
        auto start = [&](int trial) {
            std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial) * 0x9E3779B97F4A7C15ull);
            std::normal_distribution<double> nd;
            ChannelVec g{CVec(static_cast<std::size_t>(rg_.size))};
            for (auto& x : g.v) x = cplx(nd(rng), nd(rng));
            return g;
        };
        return power_norm([this](const ChannelVec& g) { return apply(g); }, [this](const ChannelVec& g) { return adjoint(g); },
                          start, channel_norm, opt);
    }

    int ell() const noexcept { return ell_; }

private:
    using Symbol = std::vector<cplx>;

    static std::shared_ptr<const Symbol> multiplier(int n, int ell, double s, RadialGrid rg) {
        static std::mutex mu;
        static std::map<std::tuple<int, int, double, int, int>, std::shared_ptr<const Symbol>> cache;
        const auto key = std::make_tuple(n, ell, s, rg.points_per_octave, rg.size);
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        const int M = rg.size;
        auto sym = std::make_shared<Symbol>(static_cast<std::size_t>(M));
        const double dw = 2.0 * std::numbers::pi / (M * rg.step());
        for (int j = 0; j < M; ++j) {
            const int jj = j < M / 2 ? j : j - M;
            (*sym)[static_cast<std::size_t>(j)] = fractional_mellin_symbol(n, ell, cplx(0.5 * n, -dw * jj), s);
        }
        cache.emplace(key, sym);
        return sym;
    }

    static void spectral(CVec& v, const Symbol& sym, bool conjugate) {
        const std::vector<int> shape{static_cast<int>(v.size())};
        fft_forward(v.data(), shape);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= conjugate ? std::conj(sym[i]) : sym[i];
        fft_inverse(v.data(), shape);
    }

    int n_, ell_, k_, m_;
    double s_;
    RadialGrid rg_;
    RVec wk_, wm_;
    std::shared_ptr<const Symbol> plus_, minus_;
};

} // namespace lpsmooth
