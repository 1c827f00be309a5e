#include <gtest/gtest.h>

#include <lpsmooth/spectral.hpp>

#include "support.hpp"

using namespace lpsmooth;
using lpsmooth::testing::Gen;
using lpsmooth::testing::max_abs_diff;
using lpsmooth::testing::plane_wave;

namespace {

Field random_field(const Grid& g, std::uint64_t seed) {
    Gen gen(seed);
    Field f(g);
    for (auto& v : f.samples) v = gen.complex_normal();
    return f;
}

} // namespace

TEST(Grid, Geometry) {
    const Grid g(2, 4.0, 16);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
    EXPECT_DOUBLE_EQ(g.coordinate(0), -4.0);
    EXPECT_DOUBLE_EQ(g.coordinate(8), 0.0);
    EXPECT_DOUBLE_EQ(g.wavenumber(1), M_PI / 4);
    EXPECT_DOUBLE_EQ(g.wavenumber(15), -M_PI / 4);
    EXPECT_DOUBLE_EQ(g.wavenumber(8), -8 * M_PI / 4);
    EXPECT_EQ(g.size(), 256u);
    EXPECT_THROW(Grid(2, 4.0, 12), DomainError);
    EXPECT_THROW(Grid(0, 4.0, 16), DomainError);
}

TEST(Transform, RoundTrip) {
    const Grid g(3, 5.0, 16);
    const Field f = random_field(g, 1);
    const Field back = from_spectrum(g, to_spectrum(f));
    double rel = max_abs_diff(f, back) / lp_norm(f, kInf);
    EXPECT_LT(rel, 1e-12);
}

TEST(Transform, Plancherel) {
    for (int n : {1, 2, 3}) {
        const Grid g(n, 3.0, n == 3 ? 16 : 64);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Field f = random_field(g, 10 + seed);
            EXPECT_NEAR(spectral_l2_norm(f), l2_norm(f), 1e-10 * l2_norm(f));
        }
    }
}

TEST(FractionalLaplacian, PlaneWaveEigenfunction) {
    const Grid g(3, 4.0, 16);
    const Field w = plane_wave(g, {1, -2, 3});
    const double xi = g.frequency_step() * std::sqrt(14.0);
    const Field out = fractional_laplacian(w, 1.0);
    EXPECT_LT(max_abs_diff(out, w * cplx(xi)), 1e-12);
}

TEST(FractionalLaplacian, ZeroOrderRemovesMean) {
    const Grid g(2, 4.0, 32);
    Field f = random_field(g, 3);
    for (auto& v : f.samples) v += 2.5;
    EXPECT_LT(max_abs_diff(fractional_laplacian(f, 0.0), remove_mean(f)), 1e-12);
}

TEST(FractionalLaplacian, CompositionOnMeanZero) {
    const Grid g(3, 4.0, 16);
    const Field f = random_field(g, 4);
    const Field back = fractional_laplacian(fractional_laplacian(f, -0.5), 0.5);
    EXPECT_LT(max_abs_diff(back, remove_mean(f)), 1e-10);
    Gen gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const double s = gen.uniform(-1.0, 1.0);
        const double t = gen.uniform(std::max(-1.0, -1.0 - s), std::min(1.0, 1.0 - s));
        const Field a = fractional_laplacian(fractional_laplacian(f, s), t);
        const Field b = fractional_laplacian(f, s + t);
        EXPECT_LT(max_abs_diff(a, b), 1e-10 * lp_norm(b, kInf));
    }
}

TEST(FractionalLaplacian, RejectsLargeOrder) {
    const Grid g(1, 4.0, 16);
    EXPECT_THROW(fractional_laplacian(Field(g), 1.5), DomainError);
    EXPECT_THROW(sobolev_norm(Field(g), -1.01), DomainError);
}

TEST(Riesz, EigenfunctionSumAndBound) {
    const Grid g(3, 4.0, 16);
    const Field w = plane_wave(g, {2, 0, -1});
    const double r = std::sqrt(5.0);
    const Field out = riesz_transform(w, 0);
    EXPECT_LT(max_abs_diff(out, w * cplx(0.0, 2.0 / r)), 1e-12);
    const Field f = random_field(g, 6);
    Field acc(g);
    for (int j = 0; j < 3; ++j) {
        const Field rj = riesz_transform(f, j);
        EXPECT_LE(l2_norm(rj), l2_norm(f) * (1 + 1e-12));
        acc += riesz_transform(rj, j);
    }
    EXPECT_LT(max_abs_diff(acc, remove_mean(f) * cplx(-1.0)), 1e-10);
    EXPECT_THROW(riesz_transform(f, 3), DomainError);
}

TEST(Sobolev, PlaneWaveAndConstantShift) {
    const Grid g(3, 2.0, 16);
    const Field w = plane_wave(g, {1, 1, 0});
    EXPECT_NEAR(sobolev_norm(w, 0.0), std::pow(4.0, 1.5), 1e-10);
    Field f = random_field(g, 7);
    Field shifted = f;
    for (auto& v : shifted.samples) v += cplx(1.0, -2.0);
    EXPECT_NEAR(sobolev_norm(f, 0.5), sobolev_norm(shifted, 0.5), 1e-10 * sobolev_norm(f, 0.5));
}

TEST(Sobolev, GaussianGradientClosedForm) {
    const Grid g(3, 10.0, 64);
    const Field f = Field::from_function(g, [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2); });
    const double exact = std::sqrt(1.5) * std::pow(M_PI, 0.75);
    EXPECT_NEAR(sobolev_norm(f, 1.0), exact, 0.01 * exact);
}

TEST(Lp, ConstantVolumeAndErrors) {
    const Grid g(2, 3.0, 16);
    Field one(g);
    for (auto& v : one.samples) v = 1.0;
    EXPECT_NEAR(lp_norm(one, 1.0), 36.0, 1e-12);
    EXPECT_NEAR(lp_norm(one, 2.0), 6.0, 1e-12);
    EXPECT_THROW(lp_norm(one, 0.5), DomainError);
}

TEST(Gradient, PlaneWaveAndPlancherel) {
    const Grid g(3, 4.0, 16);
    const Field w = plane_wave(g, {3, 1, 0});
    const auto grad = gradient(w);
    EXPECT_LT(max_abs_diff(grad[0], w * cplx(0.0, 3 * g.frequency_step())), 1e-12);
    EXPECT_LT(max_abs_diff(derivative(w, 1), w * cplx(0.0, g.frequency_step())), 1e-12);
    const Field f = remove_mean(random_field(g, 8));
    double acc = 0.0;
    for (const auto& d : gradient(f)) acc += std::pow(l2_norm(d), 2);
    EXPECT_NEAR(std::sqrt(acc), sobolev_norm(f, 1.0), 1e-10 * sobolev_norm(f, 1.0));
    // divergence of the gradient is the Laplacian
    EXPECT_LT(max_abs_diff(divergence(gradient(f)), laplacian(f)), 1e-9 * lp_norm(laplacian(f), kInf));
}
