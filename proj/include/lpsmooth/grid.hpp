#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <new>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lpsmooth {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 64-byte aligned allocator so every sample buffer has the alignment FFTW planned for.
template<class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template<class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template<class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;
using RVec = std::vector<double>;

/// Periodic box [-L, L)^n sampled with N points per axis (row-major, last axis fastest).
class Grid {
public:
    Grid() = default;
    Grid(int dim, double half_width, int points) : dim_(dim), half_width_(half_width), points_(points) {
        if (dim < 1) throw DomainError("grid dimension must be >= 1");
        if (!(half_width > 0.0)) throw DomainError("grid half-width must be positive");
        if (points < 2 || (points & (points - 1)) != 0)
            throw DomainError("points per axis must be a power of two >= 2, got " + std::to_string(points));
    }

    int dim() const noexcept { return dim_; }
    double half_width() const noexcept { return half_width_; }
    int points() const noexcept { return points_; }
    double spacing() const noexcept { return 2.0 * half_width_ / points_; }
    double cell_volume() const noexcept { return std::pow(spacing(), dim_); }
    double volume() const noexcept { return std::pow(2.0 * half_width_, dim_); }
    /// Lattice spacing of the frequency grid, pi / L.
    double frequency_step() const noexcept { return std::numbers::pi / half_width_; }
    /// Largest resolvable frequency magnitude along an axis, pi / h.
    double nyquist() const noexcept { return std::numbers::pi / spacing(); }

    std::size_t size() const noexcept {
        std::size_t s = 1;
        for (int d = 0; d < dim_; ++d) s *= static_cast<std::size_t>(points_);
        return s;
    }

    double coordinate(int i) const noexcept { return -half_width_ + i * spacing(); }
    double wavenumber(int i) const noexcept {
        const int j = i < points_ / 2 ? i : i - points_;
        return frequency_step() * j;
    }

    /// Per-axis index of a flat sample index.
    int axis_index(std::size_t flat, int axis) const noexcept {
        std::size_t stride = 1;
        for (int d = dim_ - 1; d > axis; --d) stride *= static_cast<std::size_t>(points_);
        return static_cast<int>((flat / stride) % static_cast<std::size_t>(points_));
    }

    std::size_t stride(int axis) const noexcept {
        std::size_t s = 1;
        for (int d = dim_ - 1; d > axis; --d) s *= static_cast<std::size_t>(points_);
        return s;
    }

    /// |x| at every sample.
    RVec radii() const {
        RVec r(size());
        for (std::size_t p = 0; p < r.size(); ++p) {
            double acc = 0.0;
            for (int d = 0; d < dim_; ++d) {
                const double x = coordinate(axis_index(p, d));
                acc += x * x;
            }
            r[p] = std::sqrt(acc);
        }
        return r;
    }

    /// Coordinate x_axis at every sample.
    RVec coordinates(int axis) const {
        RVec x(size());
        for (std::size_t p = 0; p < x.size(); ++p) x[p] = coordinate(axis_index(p, axis));
        return x;
    }

    /// xi_axis at every FFT-ordered frequency sample.
    RVec wavenumbers(int axis) const {
        RVec k(size());
        for (std::size_t p = 0; p < k.size(); ++p) k[p] = wavenumber(axis_index(p, axis));
        return k;
    }

    /// |xi| at every FFT-ordered frequency sample.
    RVec frequency_radii() const {
        RVec r(size());
        for (std::size_t p = 0; p < r.size(); ++p) {
            double acc = 0.0;
            for (int d = 0; d < dim_; ++d) {
                const double k = wavenumber(axis_index(p, d));
                acc += k * k;
            }
            r[p] = std::sqrt(acc);
        }
        return r;
    }

    bool operator==(const Grid&) const = default;

private:
    int dim_ = 1;
    double half_width_ = 1.0;
    int points_ = 2;
};

/// Complex samples on a grid.
struct Field {
    Grid grid;
    CVec samples;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), samples(g.size(), cplx{}) {}
    Field(const Grid& g, CVec s) : grid(g), samples(std::move(s)) {
        if (samples.size() != grid.size()) throw DomainError("sample count does not match grid");
    }

    template<class Fn>
    static Field from_function(const Grid& g, Fn&& fn) {
        Field f(g);
        std::vector<double> x(static_cast<std::size_t>(g.dim()));
        for (std::size_t p = 0; p < f.samples.size(); ++p) {
            for (int d = 0; d < g.dim(); ++d) x[d] = g.coordinate(g.axis_index(p, d));
            f.samples[p] = fn(std::span<const double>(x));
        }
        return f;
    }

    static Field from_real(const Grid& g, const RVec& values) {
        Field f(g);
        for (std::size_t p = 0; p < values.size(); ++p) f.samples[p] = values[p];
        return f;
    }

    std::size_t size() const noexcept { return samples.size(); }
    cplx& operator[](std::size_t i) noexcept { return samples[i]; }
    const cplx& operator[](std::size_t i) const noexcept { return samples[i]; }

    cplx mean() const {
        cplx acc{};
        for (const auto& v : samples) acc += v;
        return acc / static_cast<double>(samples.size());
    }

    Field& operator+=(const Field& o) {
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += o.samples[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] -= o.samples[i];
        return *this;
    }
    Field& operator*=(cplx c) {
        for (auto& v : samples) v *= c;
        return *this;
    }
    /// Pointwise multiplication by a real array.
    Field& operator*=(const RVec& w) {
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] *= w[i];
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, cplx c) { return a *= c; }
    friend Field operator*(cplx c, Field a) { return a *= c; }
    friend Field operator*(Field a, const RVec& w) { return a *= w; }
};

/// Plain Riemann-sum L2 norm sqrt(h^n sum |f|^2).
inline double l2_norm(const Field& f) {
    double acc = 0.0;
    for (const auto& v : f.samples) acc += std::norm(v);
    return std::sqrt(acc * f.grid.cell_volume());
}

inline cplx l2_inner(const Field& a, const Field& b) {
    cplx acc{};
    for (std::size_t i = 0; i < a.samples.size(); ++i) acc += std::conj(a.samples[i]) * b.samples[i];
    return acc * a.grid.cell_volume();
}

/// Time-indexed family of fields on one grid.
struct SpaceTimeField {
    std::vector<double> times;
    std::vector<Field> slices;

    SpaceTimeField() = default;
    SpaceTimeField(std::vector<double> t, std::vector<Field> s) : times(std::move(t)), slices(std::move(s)) {
        validate();
    }

    void validate() const {
        if (times.size() != slices.size()) throw DomainError("time and slice counts differ");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) throw DomainError("slice times must be strictly increasing");
        for (std::size_t i = 1; i < slices.size(); ++i)
            if (!(slices[i].grid == slices[0].grid)) throw DomainError("all slices must share one grid");
    }

    std::size_t size() const noexcept { return times.size(); }
    const Grid& grid() const { return slices.at(0).grid; }

    /// Linear interpolation in time; clamps to the end slices.
    Field at(double t) const {
        if (times.empty()) throw DomainError("empty space-time field");
        if (t <= times.front()) return slices.front();
        if (t >= times.back()) return slices.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t j = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
        if (w == 0.0) return slices[j - 1];
        Field out = slices[j - 1] * cplx(1.0 - w);
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += w * slices[j].samples[i];
        return out;
    }
};

/// Evenly spaced nodes t0, ..., t1 (count >= 2).
inline std::vector<double> linspace(double t0, double t1, std::size_t count) {
    if (count < 2) throw DomainError("linspace needs at least two nodes");
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
    t.back() = t1;
    return t;
}

/// Trapezoid weights for arbitrary increasing nodes.
inline std::vector<double> trapezoid_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double dt = t[i] - t[i - 1];
        w[i - 1] += 0.5 * dt;
        w[i] += 0.5 * dt;
    }
    return w;
}

} // namespace lpsmooth
