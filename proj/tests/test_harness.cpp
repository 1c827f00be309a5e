#include <gtest/gtest.h>

#include <lpsmooth/ensemble.hpp>
#include <lpsmooth/harness.hpp>

#include "support.hpp"

using namespace lpsmooth;
using lpsmooth::testing::Gen;
using lpsmooth::testing::max_abs_diff;

namespace {

EnsembleSpec narrow_spec() {
    EnsembleSpec s;
    s.radius_min = 1.5;
    s.radius_max = 3.0;
    return s;
}

Field gaussian_field(const Grid& g, double width) {
    return Field::from_function(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return cplx(std::exp(-r2 / (2 * width * width)));
    });
}

} // namespace

TEST(Ensemble, MembersAreStableUnderResizingAndResampling) {
    const auto small = field_ensemble(3, EnsembleSpec{}, 5, 3);
    const auto large = field_ensemble(3, EnsembleSpec{}, 5, 6);
    const Grid g(3, 8.0, 16);
    for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(max_abs_diff(small[i].sample(g), large[i].sample(g)), 0.0);
    const Field f = small[0].sample(g);
    EXPECT_LT(std::abs(f.mean()), 1e-14);
    // f(2x) on [-4, 4) is f on [-8, 8) sampled at the same indices
    FieldRecipe raw = small[0];
    raw.mean_zero = false;
    EXPECT_LT(max_abs_diff(raw.sample(Grid(3, 4.0, 16), 2.0), raw.sample(g)), 1e-13);
    for (const auto& m : large) {
        EXPECT_GE(m.packets.size(), 1u);
        EXPECT_LE(m.packets.size(), 3u);
        for (const auto& p : m.packets) {
            double r = 0.0;
            for (double c : p.centre) r += c * c;
            EXPECT_GE(std::sqrt(r), 1.5 - 1e-12);
            EXPECT_LE(std::sqrt(r), 4.0 + 1e-12);
        }
    }
    EXPECT_NE(member_seed(1, 0), member_seed(1, 1));
    EXPECT_NE(member_seed(1, 0), member_seed(2, 0));
}

TEST(Report, DegenerateAndInfinite) {
    EXPECT_TRUE(make_report("x", 0.0, 0.0).degenerate);
    EXPECT_EQ(make_report("x", 1.0, 0.0).ratio, kInf);
    EXPECT_DOUBLE_EQ(make_report("x", 1.0, 4.0).ratio, 0.25);
    const auto s = summarize({make_report("a", 1, 2), make_report("b", 0, 0), make_report("c", 3, 2)});
    EXPECT_EQ(s.argmax, 2u);
    EXPECT_EQ(s.degenerate, 1u);
    EXPECT_DOUBLE_EQ(s.max_ratio, 1.5);
}

TEST(Resolvent1D, BoxClosedForm) {
    const auto r = solve_resolvent_1d(Profile1D::box(0.0, 1.0), cplx(-1.0, 0.0));
    EXPECT_NEAR(r.sup_v, 1.0 - std::exp(-1.0), 1e-12);
    EXPECT_NEAR(r.l1_w, 1.0, 1e-12);
    EXPECT_TRUE(r.forward);
    // v(x) = 1 - e^{-x} on the support
    for (std::size_t i = 0; i < r.x.size(); i += 97) EXPECT_NEAR(std::abs(r.v[i]), 1.0 - std::exp(-r.x[i]), 1e-12);
}

TEST(Resolvent1D, MirrorCaseHasTheSameSup) {
    const auto fwd = solve_resolvent_1d(Profile1D::box(0.0, 1.0), cplx(-1.0, 0.0));
    const auto bwd = solve_resolvent_1d(Profile1D::box(-1.0, 0.0), cplx(1.0, 0.0));
    EXPECT_FALSE(bwd.forward);
    EXPECT_NEAR(bwd.sup_v, fwd.sup_v, 1e-12);
    EXPECT_NEAR(bwd.v.front().real(), -(1.0 - std::exp(-1.0)), 1e-12);
}

TEST(Resolvent1D, ZeroProfileIsDegenerate) {
    const auto rep = verify_resolvent_1d(Profile1D::box(0.0, 1.0, 0.0), cplx(-2.0, 1.0));
    EXPECT_TRUE(rep.degenerate);
    EXPECT_THROW(verify_resolvent_1d(Profile1D::box(0.0, 1.0), cplx(0.0, 1.0)), DomainError);
}

TEST(Resolvent1D, OscillatoryPacketAgainstQuadratureOracle) {
    // Direct composite Simpson evaluation of int_{-inf}^x e^{lambda (x - y)} w(y) dy at x = 1.3.
    const auto w = Profile1D::packet(0.5, 0.6, 3.0, cplx(1.0, -0.4));
    const cplx lambda(-0.7, 2.5);
    const auto r = solve_resolvent_1d(w, lambda, 4096);
    const double x = 1.3;
    std::size_t at = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i)
        if (std::abs(r.x[i] - x) < std::abs(r.x[at] - x)) at = i;
    const double xa = r.x[at];
    const int n = 200000;
    const double dy = (xa - w.lo) / n;
    cplx acc{};
    for (int i = 0; i <= n; ++i) {
        const double y = w.lo + i * dy;
        const double c = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        acc += c * std::exp(lambda * (xa - y)) * w.w(y);
    }
    EXPECT_LT(std::abs(r.v[at] - acc * dy / 3.0), 1e-9);
}

TEST(Resolvent1D, RandomPairsObeyUnitBound) {
    Gen gen(21);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Profile1D> parts;
        const int count = gen.integer(1, 3);
        for (int i = 0; i < count; ++i) {
            if (gen.uniform(0, 1) < 0.3) {
                const double a = gen.uniform(-3, 2);
                parts.push_back(Profile1D::box(a, a + gen.uniform(0.2, 2), gen.complex_normal()));
            } else {
                parts.push_back(Profile1D::packet(gen.uniform(-2, 2), gen.uniform(0.2, 1.5), gen.uniform(-5, 5), gen.complex_normal()));
            }
        }
        double re = gen.uniform(-3, 3);
        if (std::abs(re) < 1e-3) re = 0.5;
        const auto rep = verify_resolvent_1d(Profile1D::sum(parts), cplx(re, gen.uniform(-5, 5)));
        EXPECT_LE(rep.ratio, 1.0 + 1e-6);
        EXPECT_GT(rep.ratio, 0.0);
    }
}

TEST(ResolventND, SingleTransverseModeMatchesFibre) {
    const Grid g(3, 8.0, 32);
    const double k = g.frequency_step() * 2;
    const Field v = Field::from_function(g, [&](std::span<const double> x) {
        return std::exp(-x[0] * x[0] / 2.0) * std::polar(1.0, k * x[2]);
    });
    const auto rep = verify_resolvent_nd(v, cplx(-1.0, 0.5));
    EXPECT_NEAR(rep.ratio, rep.extras.at("fibre_ratio"), 1e-10 * rep.ratio);
    EXPECT_LE(rep.ratio, 0.5 * (1 + 1e-6));
    EXPECT_THROW(verify_resolvent_nd(Field(Grid(1, 8.0, 32)), cplx(-1.0)), DomainError);
}

TEST(ResolventND, PacketsObeyHalfBoundWhenKernelDecays) {
    // Half-line Green's function derivative is bounded by 1/2; Minkowski lifts it to the full estimate.
    const Grid g(3, 8.0, 32);
    const auto ens = field_ensemble(3, narrow_spec(), 31, 6);
    Gen gen(32);
    for (const auto& m : ens) {
        const cplx lambda(gen.uniform(-3.0, -0.5), gen.uniform(-2.0, 2.0));
        const auto rep = verify_resolvent_nd(m.sample(g), lambda);
        EXPECT_LE(rep.ratio, 0.5 * (1 + 1e-6));
        EXPECT_LE(rep.ratio, rep.extras.at("fibre_ratio") * (1 + 1e-12));
    }
}

TEST(MixedNorm, GaussianProfileClosedForm) {
    const Grid g(3, 8.0, 32);
    const Field f = gaussian_field(g, 1.0);
    const SpaceTimeField F(linspace(0.0, 1.0, 3), {f, f, f});
    // (int |F|^2 dt dx')^{1/2} = e^{-x1^2/2} sqrt(pi), so the L^1_{x1} norm is pi sqrt(2)
    EXPECT_NEAR(mixed_l1_l2(F, 0), std::numbers::pi * std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(mixed_linf_l2(F, 1), std::sqrt(std::numbers::pi), 1e-10);
}

TEST(MixedNorm, RotationProbeIsExact) {
    const Grid g(3, 8.0, 32);
    const NormContext ctx(g, {0, 2});
    const auto fr = forcing_ensemble(3, narrow_spec(), 41, 2);
    const auto times = linspace(0.0, 0.5, 9);
    for (const auto& m : fr) {
        const SpaceTimeField F = m.sample(g, times);
        std::vector<Field> rot;
        for (const auto& s : F.slices) rot.push_back(swap_axes(s, 0, 1));
        const auto a = verify_mixed_norm(F, ctx, 0);
        const auto b = verify_mixed_norm(SpaceTimeField(times, std::move(rot)), ctx, 1);
        EXPECT_NEAR(a.ratio, b.ratio, 1e-12 * a.ratio);
        EXPECT_GT(a.extras.at("l1_chain"), 0.0);
        EXPECT_GT(a.extras.at("sup_chain"), 0.0);
    }
}

TEST(MixedNorm, ShellChainOnBallIndicator) {
    // ||1_B||_{L^1_{x1} L^2_{x'}} against sum_k || |x|^{1/2} Q_k 1_B ||; B the ball of radius 3.
    const Grid g(3, 8.0, 64);
    const NormContext ctx(g, {-1, 2});
    const RVec r = g.radii();
    Field ind(g);
    for (std::size_t i = 0; i < r.size(); ++i) ind.samples[i] = r[i] <= 3.0 ? 1.0 : 0.0;
    const SpaceTimeField F(linspace(0.0, 1.0, 2), {ind, ind});
    // closed form: int_{-3}^{3} sqrt(pi (9 - x^2)) dx = sqrt(pi) 9 pi / 2
    EXPECT_NEAR(mixed_l1_l2(F, 0) / (std::sqrt(std::numbers::pi) * 4.5 * std::numbers::pi), 1.0, 0.02);
    double sum = 0.0;
    for (double v : detail::weighted_shell_norms(F, 0.5, ctx)) sum += v;
    EXPECT_LE(mixed_l1_l2(F, 0) / sum, 2.0);
}

TEST(Interpolation, CauchySchwarzBound) {
    const Grid g(3, 8.0, 32);
    const NormContext ctx(g, {0, 2});
    for (const auto& m : field_ensemble(3, EnsembleSpec{}, 51, 10)) {
        const auto rep = interpolation_estimate(m.sample(g), ctx);
        EXPECT_LE(rep.ratio, 1.0 + 1e-12);
        EXPECT_GT(rep.ratio, 0.1);
    }
}

TEST(Product, MultiplicationByOneReducesToIdentity) {
    const Grid g(3, 8.0, 32);
    const NormContext ctx(g, {0, 2});
    Field one(g);
    for (auto& v : one.samples) v = 1.0;
    // every mask reaches 1 on the lattice (radii 1, 2, 4 are grid points)
    EXPECT_DOUBLE_EQ(lqa_linf_norm(one, kInf, 0.0, ctx), 1.0);
    const Field f = field_ensemble(3, EnsembleSpec{}, 61, 1)[0].sample(g);
    const auto rep = product_estimate(f, one, ctx);
    EXPECT_NEAR(rep.lhs / rep.extras.at("first_term"), 1.0, 1e-12);
    EXPECT_LT(rep.ratio, 1.0);
}

TEST(Hardy, GaussianRatioConvergesToClosedForm) {
    // || e^{-r^2/2} / r ||^2 = 2 pi^{3/2}, || grad e^{-r^2/2} ||^2 = 3 pi^{3/2} / 2: ratio sqrt(4/3).
    auto error = [](int N) {
        const Grid g(3, 8.0, N);
        const auto rep = hardy_inequality(gaussian_field(g, 1.0));
        EXPECT_LE(rep.ratio, rep.extras.at("constant"));
        return std::abs(rep.ratio - std::sqrt(4.0 / 3.0));
    };
    const double e64 = error(64), e128 = error(128);
    EXPECT_LT(e64, 6e-3);
    EXPECT_LT(e128, 0.5 * e64);
    // cube average of |y|^{-2} around the origin: independent fine midpoint estimate 7.65
    EXPECT_NEAR(detail::unit_cell_inverse_square({0, 0, 0}, 24), 7.65, 0.05);
    EXPECT_THROW(hardy_inequality(Field(Grid(2, 4.0, 8))), DomainError);
}

TEST(Sobolev, RatioStableUnderRefinement) {
    const auto m = field_ensemble(3, EnsembleSpec{}, 71, 1)[0];
    const double a = sobolev_embedding(m.sample(Grid(3, 8.0, 32))).ratio;
    const double b = sobolev_embedding(m.sample(Grid(3, 8.0, 64))).ratio;
    EXPECT_LT(relative_change(a, b), 0.05);
}

TEST(Kpv, DilationIsAnExactDiscreteSymmetry) {
    // F(4t, 2x) on [-4, 4)^3 with shells shifted down by one samples the same values as F on [-8, 8)^3.
    const auto m = forcing_ensemble(3, narrow_spec(), 81, 1)[0];
    const Grid g(3, 8.0, 32), half(3, 4.0, 32);
    const auto t = linspace(0.0, 0.5, 9);
    auto t4 = t;
    for (auto& s : t4) s /= 4;
    const auto a = verify_kpv(m.sample(g, t), NormContext(g, {0, 2}));
    const auto b = verify_kpv(m.sample(half, t4, 2.0), NormContext(half, {-1, 1}));
    EXPECT_NEAR(a.ratio, b.ratio, 1e-12 * a.ratio);
    EXPECT_GT(a.ratio, 0.0);
}

TEST(Kpv, ZeroForcingIsDegenerate) {
    const Grid g(3, 8.0, 32);
    const SpaceTimeField F(linspace(0.0, 1.0, 3), {Field(g), Field(g), Field(g)});
    EXPECT_TRUE(verify_kpv(F, NormContext(g, {0, 2})).degenerate);
}

TEST(Main, ZeroPotentialMatchesFreePipeline) {
    const Grid g(3, 8.0, 32);
    const NormContext ctx(g, {0, 2});
    const auto t = linspace(0.0, 0.5, 17);
    const Field f = field_ensemble(3, EnsembleSpec{}, 91, 1)[0].sample(g);
    const auto F = forcing_ensemble(3, EnsembleSpec{}, 92, 1)[0].sample(g, t);
    const auto a = verify_main(f, F, MagneticPotential::zero(g), ctx);
    const auto b = verify_main_free(f, F, ctx);
    EXPECT_NEAR(a.ratio, b.ratio, 1e-8 * b.ratio);
    EXPECT_EQ(a.extras.at("audit"), 0.0);
}

TEST(Main, PotentialRescaledToAuditTarget) {
    const Grid g(3, 8.0, 32);
    const DyadicDecomposition d(0, 2);
    const auto A = potential_with_audit(packet_potential(g, 1.0), d, 0.08);
    EXPECT_NEAR(smallness_audit(A, d).total, 0.08, 1e-12);
    EXPECT_THROW(potential_with_audit(MagneticPotential::zero(g), d, 0.08), DomainError);
}

TEST(Main, DilationOfFreePipelineIsExact) {
    const Grid g(3, 8.0, 32), half(3, 4.0, 32);
    const auto t = linspace(0.0, 0.5, 9);
    auto t4 = t;
    for (auto& s : t4) s /= 4;
    const auto fr = field_ensemble(3, narrow_spec(), 93, 1)[0];
    const auto Fr = forcing_ensemble(3, narrow_spec(), 94, 1)[0];
    FieldRecipe raw = fr;
    raw.mean_zero = false;
    const auto a = verify_main_free(raw.sample(g), Fr.sample(g, t), NormContext(g, {0, 2}));
    // u(4t, 2x) solves the problem with data f(2x) and forcing 4 F(4t, 2x)
    SpaceTimeField F2 = Fr.sample(half, t4, 2.0);
    for (auto& s : F2.slices) s *= cplx(4.0);
    const auto b = verify_main_free(raw.sample(half, 2.0), F2, NormContext(half, {-1, 1}));
    EXPECT_NEAR(a.ratio, b.ratio, 1e-10 * a.ratio);
}

TEST(Endpoint, BestSplitIsNoWorseThanTrivial) {
    const Grid g(3, 8.0, 32);
    const NormContext ctx(g, {0, 2});
    const auto t = linspace(0.0, 0.5, 9);
    const Field f = field_ensemble(3, EnsembleSpec{}, 95, 1)[0].sample(g);
    const auto F = forcing_ensemble(3, EnsembleSpec{}, 96, 1)[0].sample(g, t);
    auto splits = trivial_splits(F);
    const auto trivial = verify_free_endpoint(f, F, splits, ctx);
    for (auto& s : threshold_splits(F, -2, 2)) splits.push_back(std::move(s));
    const auto all = verify_free_endpoint(f, F, splits, ctx);
    EXPECT_LE(all.rhs, trivial.rhs);
    EXPECT_GE(all.ratio, trivial.ratio);
    EXPECT_EQ(splits.size(), 7u);
    // split parts recombine to F
    for (const auto& s : splits) EXPECT_LT(max_abs_diff(s.y_part.slices[3] + s.l1_part.slices[3], F.slices[3]), 1e-12);
    EXPECT_THROW(verify_free_endpoint(f, F, {}, ctx), DomainError);
}
