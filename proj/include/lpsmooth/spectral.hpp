#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fft.hpp"

namespace lpsmooth {

/// |xi|^s on the FFT lattice with the zero mode set to 0.
inline RVec fractional_symbol(const Grid& g, double s) {
    RVec sym = g.frequency_radii();
    for (auto& r : sym) r = r > 0.0 ? std::pow(r, s) : 0.0;
    return sym;
}

inline void check_smoothness(double s) {
    if (!(std::abs(s) <= 1.0)) throw DomainError("smoothness s must satisfy |s| <= 1, got " + std::to_string(s));
}

/// |D|^s f; the zero mode is always annihilated.
inline Field fractional_laplacian(const Field& f, double s) {
    check_smoothness(s);
    return apply_multiplier(f, fractional_symbol(f.grid, s));
}

inline void check_axis(const Grid& g, int j) {
    if (j < 0 || j >= g.dim()) throw DomainError("axis " + std::to_string(j) + " out of range for dimension " + std::to_string(g.dim()));
}

/// Riesz transform with symbol i xi_j / |xi|, so that sum_j R_j R_j f = -(f - mean f).
inline Field riesz_transform(const Field& f, int j) {
    check_axis(f.grid, j);
    const RVec kj = f.grid.wavenumbers(j);
    const RVec kr = f.grid.frequency_radii();
    std::vector<cplx> sym(kj.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = kr[i] > 0.0 ? cplx(0.0, kj[i] / kr[i]) : cplx{};
    return apply_multiplier(f, sym);
}

/// Spectral derivative d/dx_j (multiplier i xi_j).
inline Field derivative(const Field& f, int j) {
    check_axis(f.grid, j);
    const RVec kj = f.grid.wavenumbers(j);
    std::vector<cplx> sym(kj.size());
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = cplx(0.0, kj[i]);
    return apply_multiplier(f, sym);
}

inline std::vector<Field> gradient(const Field& f) {
    const CVec c = to_spectrum(f);
    std::vector<Field> out;
    for (int j = 0; j < f.grid.dim(); ++j) {
        const RVec kj = f.grid.wavenumbers(j);
        CVec d = c;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= cplx(0.0, kj[i]);
        out.push_back(from_spectrum(f.grid, std::move(d)));
    }
    return out;
}

/// sum_j d_j v_j, accumulated in spectral space with one inverse transform.
inline Field divergence(const std::vector<Field>& v) {
    if (v.empty()) throw DomainError("divergence of an empty vector field");
    const Grid& g = v.front().grid;
    if (static_cast<int>(v.size()) != g.dim()) throw DomainError("vector field needs one component per axis");
    CVec acc(g.size(), cplx{});
    for (int j = 0; j < g.dim(); ++j) {
        const CVec c = to_spectrum(v[static_cast<std::size_t>(j)]);
        const RVec kj = g.wavenumbers(j);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cplx(0.0, kj[i]) * c[i];
    }
    return from_spectrum(g, std::move(acc));
}

inline Field laplacian(const Field& f) {
    RVec sym = f.grid.frequency_radii();
    for (auto& r : sym) r = -r * r;
    return apply_multiplier(f, sym);
}

/// Riemann-sum L^p norm with weight h^{n/p}; p = inf gives the grid max.
inline double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw DomainError("Lebesgue exponent p must be >= 1, got " + std::to_string(p));
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f.samples) m = std::max(m, std::abs(v));
        return m;
    }
    double peak = 0.0;
    for (const auto& v : f.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& v : f.samples) acc += std::pow(std::abs(v) / peak, p);
    return peak * std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

/// ||f||_{H^s dot} = || |D|^s f ||_{L^2}.
inline double sobolev_norm(const Field& f, double s) {
    check_smoothness(s);
    const CVec c = to_spectrum(f);
    const RVec sym = fractional_symbol(f.grid, s);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += std::norm(c[i]) * sym[i] * sym[i];
    return std::sqrt(acc * f.grid.cell_volume());
}

/// L^2 norm computed in frequency space (Plancherel under the unitary convention).
inline double spectral_l2_norm(const Field& f) {
    const CVec c = to_spectrum(f);
    double acc = 0.0;
    for (const auto& v : c) acc += std::norm(v);
    return std::sqrt(acc * f.grid.cell_volume());
}

/// Field with the zero mode removed.
inline Field remove_mean(Field f) {
    const cplx m = f.mean();
    for (auto& v : f.samples) v -= m;
    return f;
}

} // namespace lpsmooth
