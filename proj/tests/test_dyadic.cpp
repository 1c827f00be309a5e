#include <gtest/gtest.h>

#include <lpsmooth/dyadic.hpp>

#include "support.hpp"

using namespace lpsmooth;
using lpsmooth::testing::Gen;
using lpsmooth::testing::oracle_phi;

TEST(Bump, ShellCentreAndEndpoints) {
    const auto phi = make_bump();
    EXPECT_DOUBLE_EQ(phi(1.0), 1.0);
    EXPECT_EQ(phi(0.5), 0.0);
    EXPECT_EQ(phi(2.0), 0.0);
    EXPECT_EQ(phi(0.3), 0.0);
    EXPECT_EQ(phi(5.0), 0.0);
    EXPECT_EQ(phi.inner_cutoff, 0.5);
    EXPECT_EQ(phi.outer_cutoff, 2.0);
}

TEST(Bump, MatchesIndependentOracle) {
    const auto phi = make_bump();
    Gen gen(11);
    for (int i = 0; i < 1000; ++i) {
        const double s = gen.uniform(0.3, 2.5);
        EXPECT_NEAR(phi(s), oracle_phi(s), 1e-15);
        EXPECT_GE(phi(s), 0.0);
    }
}

TEST(Bump, PartitionIdentityAtRandomPoints) {
    const auto phi = make_bump();
    Gen gen(12);
    for (int i = 0; i < 1000; ++i) {
        const double s = std::exp2(gen.uniform(-6.0, 6.0));
        double acc = 0.0;
        int nonzero = 0;
        for (int k = -8; k <= 8; ++k) {
            const double v = phi(s / std::exp2(k));
            acc += v;
            nonzero += v != 0.0;
        }
        EXPECT_NEAR(acc, 1.0, 1e-12);
        EXPECT_LE(nonzero, 2);
    }
    double acc = 0.0;
    for (int k = -8; k <= 8; ++k) acc += phi(3.7 / std::exp2(k));
    EXPECT_NEAR(acc, 1.0, 1e-12);
}

TEST(Bump, FiniteDifferencesStayBoundedUnderRefinement) {
    const auto phi = make_bump();
    // Order-4 differences scaled by h^-4 approximate phi''''; they must not blow up as h shrinks.
    double previous = 0.0;
    for (double h : {4e-3, 2e-3, 1e-3}) {
        double worst = 0.0;
        for (double s = 0.5; s <= 2.0; s += h / 3) {
            const double d4 = phi(s + 2 * h) - 4 * phi(s + h) + 6 * phi(s) - 4 * phi(s - h) + phi(s - 2 * h);
            worst = std::max(worst, std::abs(d4) / std::pow(h, 4));
        }
        if (previous > 0.0) EXPECT_LT(worst, 1.5 * previous);
        previous = worst;
    }
    EXPECT_TRUE(std::isfinite(previous));
}

TEST(SpatialMasks, OneDimensionalExample) {
    const Grid g(1, 8.0, 256);
    const DyadicDecomposition d(-2, 2);
    const auto fam = spatial_masks(d, g);
    EXPECT_EQ(fam.count(), 5u);
    const auto r = g.radii();
    // x = 1.3 is not a grid point; evaluate the family through the profile at the same radius instead,
    // then check the grid points agree with it.
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) acc += d.shell(k, 1.3);
    EXPECT_NEAR(acc, 1.0, 1e-12);
    EXPECT_EQ(d.shell(0, 3.0), 0.0);
    EXPECT_DOUBLE_EQ(d.shell(1, 2.0), 1.0);
    const auto total = fam.sum();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] >= 0.25 && r[i] <= 4.0) EXPECT_NEAR(total[i], 1.0, 1e-12) << "x = " << r[i];
        if (std::abs(r[i] - 2.0) < 1e-12) EXPECT_DOUBLE_EQ(fam[1][i], 1.0);
    }
}

TEST(SpatialMasks, SupportDiscipline) {
    const Grid g(2, 8.0, 64);
    const auto fam = spatial_masks(DyadicDecomposition(-1, 2), g);
    const auto r = g.radii();
    for (int k = -1; k <= 2; ++k)
        for (int m = -1; m <= 2; ++m) {
            if (std::abs(k - m) < 2) continue;
            for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(fam[k][i] * fam[m][i], 0.0);
        }
    for (int k = -1; k <= 2; ++k)
        for (std::size_t i = 0; i < r.size(); ++i)
            if (fam[k][i] != 0.0) {
                EXPECT_GT(r[i], std::ldexp(1.0, k - 1));
                EXPECT_LT(r[i], std::ldexp(1.0, k + 1));
            }
}

TEST(SpatialMasks, RandomPointsInCoveredAnnulus) {
    const DyadicDecomposition d(-3, 4);
    Gen gen(21);
    for (int i = 0; i < 1000; ++i) {
        const double r = std::exp2(gen.uniform(-2.0, 3.0));
        double acc = 0.0;
        for (int k = d.k_min; k <= d.k_max; ++k) acc += d.shell(k, r);
        EXPECT_NEAR(acc, 1.0, 1e-10);
    }
}

TEST(SpatialMasks, RangeErrorsNameTheBound) {
    const Grid g(1, 8.0, 64);  // h = 0.25
    try {
        spatial_masks(DyadicDecomposition(-2, 2), g);
        FAIL() << "expected a range error";
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("k_min"), std::string::npos);
    }
    try {
        spatial_masks(DyadicDecomposition(0, 3), g);
        FAIL() << "expected a range error";
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("k_max"), std::string::npos);
    }
}

TEST(FrequencyMasks, ZeroModeAndPartition) {
    const Grid g(3, 8.0, 32);
    const DyadicDecomposition d(0, 1);
    const auto fam = frequency_masks(d, g);
    for (int k = 0; k <= 1; ++k) EXPECT_EQ(fam[k][0], 0.0);
    const auto r = g.frequency_radii();
    const auto total = fam.sum();
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= 1.0 && r[i] <= 2.0) EXPECT_NEAR(total[i], 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(d.shell(0, 1.0), 1.0);
    EXPECT_THROW(frequency_masks(DyadicDecomposition(-1, 1), g), RangeError);
    EXPECT_THROW(frequency_masks(DyadicDecomposition(0, 2), g), RangeError);
}

TEST(ShellRange, Parse) {
    EXPECT_EQ(parse_shells("-3:4"), (ShellRange{-3, 4}));
    EXPECT_THROW(parse_shells("3"), ConfigError);
    EXPECT_THROW(parse_shells("4:1"), ConfigError);
    EXPECT_THROW(parse_shells("a:b"), ConfigError);
}

TEST(PlateauMasks, PlateauIsOneOnSupportAndAverageIsPartition) {
    const Grid g(1, 16.0, 256);
    const DyadicDecomposition d(-2, 2);
    const auto fam = spatial_masks(d, g);
    for (int m = -1; m <= 1; ++m) {
        const auto plateau = plateau_mask(d, g, m);
        for (std::size_t i = 0; i < plateau.size(); ++i)
            if (fam[m][i] > 0.0) EXPECT_NEAR(plateau[i], 1.0, 1e-12);
    }
    const auto r = g.radii();
    RVec sum(g.size(), 0.0);
    for (int m = -3; m <= 3; ++m) {
        const auto avg = averaged_mask(d, g, m);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += avg[i];
    }
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= 0.25 && r[i] <= 4.0) EXPECT_NEAR(sum[i], 1.0, 1e-12);
}

TEST(SeqNorm, Examples) {
    EXPECT_NEAR(seq_norm(WeightedSeq::impulse(3), 2.0, 0.5), 2.828427124746, 1e-12);
    EXPECT_NEAR(seq_norm(WeightedSeq::impulse(3), kInf, -0.5), 0.353553390593, 1e-12);
    EXPECT_NEAR(seq_norm(WeightedSeq::constant(0, 3), 1.0, 1.0), 7.0, 1e-12);
    EXPECT_THROW(seq_norm(WeightedSeq::impulse(0), 0.5, 0.0), DomainError);
    EXPECT_EQ(seq_norm(WeightedSeq{}, 2.0, 1.0), 0.0);
}

TEST(SeqNorm, MonotoneInQ) {
    Gen gen(31);
    for (int trial = 0; trial < 100; ++trial) {
        WeightedSeq a;
        const int len = gen.integer(1, 12);
        for (int i = 0; i < len; ++i) a.entries[gen.integer(-10, 10)] = gen.complex_normal();
        const double alpha = gen.uniform(-1.0, 1.0);
        double prev = kInf;
        for (double q : {1.0, 1.5, 2.0, 3.0, 7.0, kInf}) {
            const double v = seq_norm(a, q, alpha);
            EXPECT_LE(v, prev * (1 + 1e-12));
            prev = v;
        }
    }
}

TEST(SeqNorm, ShiftCovariance) {
    Gen gen(32);
    for (int trial = 0; trial < 100; ++trial) {
        WeightedSeq a;
        for (int i = 0; i < 6; ++i) a.entries[gen.integer(-5, 5)] = gen.complex_normal();
        const double alpha = gen.uniform(-2.0, 2.0);
        for (double q : {1.0, 2.0, kInf}) {
            // b_k = a_{k-1}
            const double ratio = seq_norm(a.shifted(1), q, alpha) / seq_norm(a, q, alpha);
            EXPECT_NEAR(ratio, std::exp2(alpha), 1e-12 * std::exp2(alpha));
        }
    }
}

TEST(SeqNorm2, OrderingsDiffer) {
    WeightedSeq2 a;
    a.entries[{0, 0}] = 1.0;
    a.entries[{0, 1}] = 1.0;
    a.entries[{1, 0}] = 1.0;
    // inner over k1 with q=2, outer over k2 with q=1: sqrt(2) + 1
    const MixedNormSpec inner_k1{0, 2.0, 1.0, 0.0, 0.0};
    const MixedNormSpec inner_k2{1, 1.0, 2.0, 0.0, 0.0};
    EXPECT_NEAR(seq2_norm(a, inner_k1), std::sqrt(2.0) + 1.0, 1e-12);
    // inner over k2 with q=1, outer over k1 with q=2: sqrt(2^2 + 1)
    EXPECT_NEAR(seq2_norm(a, inner_k2), std::sqrt(5.0), 1e-12);
    EXPECT_NE(inner_k1.ordering(), inner_k2.ordering());
}
