#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "grid.hpp"

namespace lpsmooth {

/// Gaussian wave packet a exp(-|x - c|^2 / (2 w^2)) e^{i xi.x}.
struct Packet {
    std::vector<double> centre;
    std::vector<double> carrier;
    double width = 1.0;
    cplx amplitude{1.0, 0.0};

    cplx operator()(std::span<const double> x) const {
        double d2 = 0.0, phase = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            d2 += (x[j] - centre[j]) * (x[j] - centre[j]);
            phase += carrier[j] * x[j];
        }
        return amplitude * std::exp(-d2 / (2 * width * width)) * std::polar(1.0, phase);
    }
};

/// Analytic field given by a packet sum, so it can be resampled on any grid and at any dilation.
struct FieldRecipe {
    std::vector<Packet> packets;
    bool mean_zero = true;

    /// Samples x -> f(lambda x) on the grid, then removes the grid mean if requested.
    Field sample(const Grid& g, double dilation = 1.0) const {
        std::vector<double> y(static_cast<std::size_t>(g.dim()));
        Field f = Field::from_function(g, [&](std::span<const double> x) {
            for (std::size_t j = 0; j < y.size(); ++j) y[j] = dilation * x[j];
            cplx acc{};
            for (const auto& p : packets) acc += p(y);
            return acc;
        });
        if (mean_zero) {
            const cplx m = f.mean();
            for (auto& v : f.samples) v -= m;
        }
        return f;
    }
};

/// F(t, x) = g(x) sin(pi t / T) e^{-i omega t} on [0, T].
struct ForcingRecipe {
    FieldRecipe spatial;
    double omega = 0.0;
    double horizon = 1.0;

    double envelope_scale(double t) const { return std::sin(std::numbers::pi * t / horizon); }

    /// Samples (t, x) -> F(lambda^2 t, lambda x) at the given times.
    SpaceTimeField sample(const Grid& g, const std::vector<double>& times, double dilation = 1.0) const {
        const Field base = spatial.sample(g, dilation);
        std::vector<Field> slices;
        slices.reserve(times.size());
        for (double t : times) {
            const double s = dilation * dilation * t;
            slices.push_back(base * (envelope_scale(s) * std::polar(1.0, -omega * s)));
        }
        return SpaceTimeField(times, std::move(slices));
    }
};

/// Ranges the random packets are drawn from. Radii are biased toward the middle dyadic shells.
struct EnsembleSpec {
    int packets_min = 1;
    int packets_max = 3;
    double radius_min = 1.5;
    double radius_max = 4.0;
    double width_min = 0.7;
    double width_max = 1.0;
    double carrier_min = 0.5;
    double carrier_max = 1.5;
    double omega_max = 2.0;
    double horizon = 0.5;
};

/// Well-mixed per-member seed, so member i is the same whatever the ensemble size.
inline std::uint64_t member_seed(std::uint64_t seed, std::size_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace detail {

inline std::vector<double> random_direction(std::mt19937_64& rng, int dim, double length) {
    std::normal_distribution<double> nd;
    std::vector<double> x(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& v : x) {
            v = nd(rng);
            n2 += v * v;
        }
    } while (n2 < 1e-12);
    for (auto& v : x) v *= length / std::sqrt(n2);
    return x;
}

} // namespace detail

inline FieldRecipe draw_field(int dim, const EnsembleSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01;
    std::normal_distribution<double> nd;
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
    const int count = spec.packets_min + static_cast<int>(u01(rng) * (spec.packets_max - spec.packets_min + 1));
    FieldRecipe r;
    for (int i = 0; i < std::min(count, spec.packets_max); ++i) {
        Packet p;
        p.centre = detail::random_direction(rng, dim, uniform(spec.radius_min, spec.radius_max));
        p.carrier = detail::random_direction(rng, dim, uniform(spec.carrier_min, spec.carrier_max));
        p.width = uniform(spec.width_min, spec.width_max);
        p.amplitude = cplx(nd(rng), nd(rng));
        r.packets.push_back(std::move(p));
    }
    return r;
}

inline std::vector<FieldRecipe> field_ensemble(int dim, const EnsembleSpec& spec, std::uint64_t seed, std::size_t count) {
    std::vector<FieldRecipe> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(draw_field(dim, spec, member_seed(seed, i)));
    return out;
}

inline std::vector<ForcingRecipe> forcing_ensemble(int dim, const EnsembleSpec& spec, std::uint64_t seed, std::size_t count) {
    std::vector<ForcingRecipe> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t s = member_seed(seed, i);
        ForcingRecipe f;
        f.spatial = draw_field(dim, spec, s);
        std::mt19937_64 rng(s ^ 0xD1B54A32D192ED03ull);
        f.omega = std::uniform_real_distribution<double>(-spec.omega_max, spec.omega_max)(rng);
        f.horizon = spec.horizon;
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace lpsmooth
