#pragma once

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "grid.hpp"

namespace lpsmooth {

/// Unitary DFT convention: forward and inverse both scale by N^{-d/2}.
inline constexpr const char* kFourierConvention = "unitary DFT, scale N^(-n/2) both directions, kernel exp(-i xi.x) forward";

namespace detail {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

    // Plans are created with FFTW_ESTIMATE for the given shape; the buffer alignment
    // decides whether the SIMD plan or the unaligned variant is returned.
    fftw_plan get(const std::vector<int>& shape, int howmany, int sign, bool aligned) {
        const Key key{shape, howmany, sign, aligned};
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t total = static_cast<std::size_t>(howmany);
        for (int d : shape) total *= static_cast<std::size_t>(d);
        CVec scratch(total);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        int dist = 1;
        for (int d : shape) dist *= d;
        const unsigned flags = FFTW_ESTIMATE | (aligned ? 0u : FFTW_UNALIGNED);
        fftw_plan plan = fftw_plan_many_dft(static_cast<int>(shape.size()), shape.data(), howmany, p, nullptr, 1, dist,
                                            p, nullptr, 1, dist, sign, flags);
        if (!plan) throw DomainError("FFTW could not create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    PlanCache() = default;
    using Key = std::tuple<std::vector<int>, int, int, bool>;
    std::map<Key, fftw_plan> plans_;
    std::mutex mutex_;
};

inline bool is_aligned(const void* p) { return reinterpret_cast<std::uintptr_t>(p) % 64 == 0; }

inline void transform(cplx* data, const std::vector<int>& shape, int howmany, int sign) {
    fftw_plan plan = PlanCache::instance().get(shape, howmany, sign, is_aligned(data));
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
    std::size_t per = 1;
    for (int d : shape) per *= static_cast<std::size_t>(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(per));
    const std::size_t total = per * static_cast<std::size_t>(howmany);
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

} // namespace detail

/// In-place unitary transform of a contiguous array with the given shape.
inline void fft_forward(cplx* data, const std::vector<int>& shape) { detail::transform(data, shape, 1, FFTW_FORWARD); }
inline void fft_inverse(cplx* data, const std::vector<int>& shape) { detail::transform(data, shape, 1, FFTW_BACKWARD); }

/// `howmany` consecutive transforms of `shape`, each block contiguous.
inline void fft_forward_batch(cplx* data, const std::vector<int>& shape, int howmany) {
    detail::transform(data, shape, howmany, FFTW_FORWARD);
}
inline void fft_inverse_batch(cplx* data, const std::vector<int>& shape, int howmany) {
    detail::transform(data, shape, howmany, FFTW_BACKWARD);
}

inline std::vector<int> grid_shape(const Grid& g) { return std::vector<int>(static_cast<std::size_t>(g.dim()), g.points()); }

/// Spectral coefficients of a field in FFT ordering.
inline CVec to_spectrum(const Field& f) {
    CVec c = f.samples;
    fft_forward(c.data(), grid_shape(f.grid));
    return c;
}

inline Field from_spectrum(const Grid& g, CVec c) {
    fft_inverse(c.data(), grid_shape(g));
    return Field(g, std::move(c));
}

/// Applies a real or complex Fourier multiplier sampled on the FFT-ordered lattice.
template<class Symbol>
Field apply_multiplier(const Field& f, const Symbol& symbol) {
    CVec c = to_spectrum(f);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol[i];
    return from_spectrum(f.grid, std::move(c));
}

} // namespace lpsmooth
