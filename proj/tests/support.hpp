#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <lpsmooth/grid.hpp>

namespace lpsmooth::testing {

/// Seeded generator for the hand-rolled property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal() { return nd_(rng_); }
    cplx complex_normal() { return {nd_(rng_), nd_(rng_)}; }

    /// Point at distance r from the origin in a uniformly random direction.
    std::vector<double> point_at_radius(int dim, double r) {
        std::vector<double> x(static_cast<std::size_t>(dim));
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (auto& v : x) {
                v = normal();
                n2 += v * v;
            }
        } while (n2 < 1e-12);
        for (auto& v : x) v *= r / std::sqrt(n2);
        return x;
    }

    /// Random smooth mean-zero field: a few Gaussian packets.
    Field packets(const Grid& g, int count, double r_lo, double r_hi, double width, double kmax) {
        std::vector<std::vector<double>> centres, freqs;
        std::vector<cplx> amps;
        for (int i = 0; i < count; ++i) {
            centres.push_back(point_at_radius(g.dim(), uniform(r_lo, r_hi)));
            freqs.push_back(point_at_radius(g.dim(), uniform(0.0, kmax)));
            amps.push_back(complex_normal());
        }
        Field f = Field::from_function(g, [&](std::span<const double> x) {
            cplx acc{};
            for (int i = 0; i < count; ++i) {
                double d2 = 0.0, ph = 0.0;
                for (int j = 0; j < g.dim(); ++j) {
                    d2 += (x[j] - centres[i][j]) * (x[j] - centres[i][j]);
                    ph += freqs[i][j] * x[j];
                }
                acc += amps[i] * std::exp(-d2 / (2 * width * width)) * std::polar(1.0, ph);
            }
            return acc;
        });
        const cplx m = f.mean();
        for (auto& v : f.samples) v -= m;
        return f;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> nd_;
};

/// Independent re-derivation of the dyadic bump used as a test oracle.
inline double oracle_phi(double s) {
    auto e = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
    auto chi = [&](double x) {
        const double a = e(2.0 - x), b = e(x - 1.0);
        return a / (a + b);
    };
    return chi(s) - chi(2.0 * s);
}

inline Field plane_wave(const Grid& g, const std::vector<int>& modes) {
    return Field::from_function(g, [&](std::span<const double> x) {
        double ph = 0.0;
        for (int j = 0; j < g.dim(); ++j) ph += g.frequency_step() * modes[j] * x[j];
        return std::polar(1.0, ph);
    });
}

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
    return m;
}

} // namespace lpsmooth::testing
