#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gl3ba/bethe_vectors.hpp"
#include "gl3ba/identities.hpp"

using namespace gl3ba;

namespace {

const cplx kKappa{0.4, 0.1};
const cplx kBeta{0.7, -0.2};

ChainModel make_model(int length) {
    const std::vector<cplx> xi{cplx{0.13, -0.41}, cplx{-0.77, 0.29}, cplx{0.52, 0.66}};
    return ChainModel(HilbertSpace(length), SpectralSet(std::vector<cplx>(xi.begin(), xi.begin() + length)), kKappa,
                      kBeta, Coupling(1.0));
}

const std::vector<cplx> kU{cplx{1.31, 0.47}, cplx{-0.58, 1.62}, cplx{0.21, -1.74}};
const std::vector<cplx> kV{cplx{-1.46, -0.33}, cplx{2.07, 0.91}, cplx{0.69, 1.88}};

std::vector<cplx> first(const std::vector<cplx>& xs, std::size_t n) { return {xs.begin(), xs.begin() + n}; }

// (1,1): lambda(u) = kappa f(v,u) solved for v.
cplx semi_onshell_v(const ChainModel& m, cplx u) { return u + m.c() / (m.lambda(u) / m.kappa() - 1.0); }

} // namespace

TEST(BetheVectors, EmptyIsVacuum) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const BetheVectorResult r = gbv(t, std::span<const cplx>{}, std::span<const cplx>{});
    EXPECT_EQ(relative_difference(r.vector, vacuum(m.space())), 0.0);
    EXPECT_EQ(r.term_count, 1u);
}

TEST(BetheVectors, FirstLevelOnly) {
    const ChainModel m = make_model(3);
    for (Variant var : {Variant::plain, Variant::twisted}) {
        const Monodromy t(m, var);
        const auto u = first(kU, 2);
        const StateVector expect =
            (1.0 / (m.kappa() * m.kappa())) * (t(1, 2, u[0]) * (t(1, 2, u[1]) * vacuum(m.space())));
        EXPECT_LT(relative_difference(gbv(t, u, {}).vector, expect), 1e-14);
    }
}

TEST(BetheVectors, SecondLevelOnlyOnTwistedVacuum) {
    // T23 |0> = beta |0>, so B_{0,b} = (beta/kappa)^b |0> whatever v is.
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    for (std::size_t b = 1; b <= 2; ++b) {
        const auto v = first(kV, b);
        const StateVector expect = std::pow(m.beta() / m.kappa(), static_cast<double>(b)) * vacuum(m.space());
        EXPECT_LT(relative_difference(gbv(t, {}, v).vector, expect), 1e-14);
    }
    const Monodromy plain(m, Variant::plain);
    EXPECT_LT(gbv(plain, {}, first(kV, 1)).vector.norm(), 1e-15);
}

TEST(BetheVectors, OneByOneClosedForm) {
    // B_{1,1} = (T13(u) + T12(u) T23(v) / (kappa g(v,u))) |0> / kappa
    const ChainModel m = make_model(2);
    const cplx u = kU[0];
    const cplx v = kV[0];
    const StateVector vac = vacuum(m.space());
    for (Variant var : {Variant::plain, Variant::twisted}) {
        const Monodromy t(m, var);
        const StateVector expect =
            (1.0 / m.kappa()) * (t(1, 3, u) * vac + (1.0 / (m.kappa() * m.coupling().g(v, u))) *
                                                       (t(1, 2, u) * (t(2, 3, v) * vac)));
        const std::vector<cplx> us{u};
        const std::vector<cplx> vs{v};
        EXPECT_LT(relative_difference(gbv(t, us, vs).vector, expect), 1e-14) << to_string(var);
    }
}

TEST(BetheVectors, HattedSecondLevelIsFirstLevelOfT) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const Monodromy hat(m, Variant::hatted);
    const std::vector<cplx> vs{kU[1]};
    const StateVector expect = (-1.0 / m.lambda(kU[1])) * (t(1, 2, kU[1]) * vacuum(m.space()));
    EXPECT_LT(relative_difference(gbv(hat, {}, vs).vector, expect), 1e-13);
}

TEST(BetheVectors, UntwistedVectorsCarryTheirWeight) {
    const ChainModel m = make_model(3);
    const Monodromy plain(m, Variant::plain);
    const LinearOperator w1 = weight_operator(1, m.space());
    const LinearOperator w3 = weight_operator(3, m.space());
    for (auto [a, b] : {std::pair<std::size_t, std::size_t>{1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
        const StateVector bv = gbv(plain, first(kU, a), first(kV, b)).vector;
        ASSERT_GT(bv.norm(), 0.0);
        // eigenvalue L - a may be zero, so compare against |B| rather than relatively
        EXPECT_LT((w1 * bv - (3.0 - static_cast<double>(a)) * bv).norm() / bv.norm(), 1e-13);
        EXPECT_LT((w3 * bv - static_cast<double>(b) * bv).norm() / bv.norm(), 1e-13);
    }
}

TEST(BetheVectors, TwistedVectorsMixSectors) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const StateVector bv = gbv(t, first(kU, 1), first(kV, 1)).vector;
    const LinearOperator w3 = weight_operator(3, m.space());
    EXPECT_GT(proportionality(w3 * bv, bv).residual, 1e-3);
}

TEST(BetheVectors, SymmetricUnderShuffles) {
    const ChainModel m = make_model(3);
    const Monodromy t(m, Variant::twisted);
    const auto u = first(kU, 2);
    const auto v = first(kV, 2);
    const StateVector ref = gbv(t, u, v).vector;
    const std::vector<cplx> us{u[1], u[0]};
    const std::vector<cplx> vs{v[1], v[0]};
    EXPECT_LT(relative_difference(gbv(t, us, v).vector, ref), 1e-13);
    EXPECT_LT(relative_difference(gbv(t, u, vs).vector, ref), 1e-13);
}

TEST(BetheVectors, RegularWhenVMeetsU) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const std::vector<cplx> u{kU[0], kU[1]};
    std::vector<cplx> v{kU[0], kV[1]};
    const StateVector at = gbv(t, u, v).vector;
    ASSERT_TRUE(std::isfinite(at.norm()));
    v[0] = kU[0] + cplx{1e-7, -1e-7};
    EXPECT_LT(relative_difference(gbv(t, u, v).vector, at), 1e-5);
}

TEST(BetheVectors, ExpansionsAgreeWithDoubleSum) {
    const ChainModel m = make_model(3);
    const Monodromy t(m, Variant::twisted);
    const Monodromy plain(m, Variant::plain);
    for (auto [a, b] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
        const auto u = first(kU, a);
        const auto v = first(kV, b);
        EXPECT_LT(relative_difference(twisted_expansion(t, u, v).vector, gbv(t, u, v).vector), 1e-12);
        if (b <= a) EXPECT_LT(relative_difference(partition_b0(plain, u, v).vector, gbv(plain, u, v).vector), 1e-12);
    }
}

TEST(BetheVectors, ConstructionPreconditions) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const Monodromy plain(m, Variant::plain);
    EXPECT_THROW(partition_b0(plain, first(kU, 1), first(kV, 2)), std::invalid_argument);
    EXPECT_THROW(partition_b0(t, first(kU, 1), first(kV, 1)), std::invalid_argument);
    EXPECT_THROW(twisted_expansion(plain, first(kU, 1), first(kV, 1)), std::invalid_argument);
    EXPECT_THROW(semi_onshell_rep(plain, first(kU, 1), first(kV, 1)), std::invalid_argument);
    EXPECT_THROW(bg_multi_formula(plain, first(kU, 1)), std::invalid_argument);
}

TEST(BetheParams, ValidateRejectsCollisions) {
    const ChainModel m = make_model(2);
    const BetheParams ok{SpectralSet{kU[0], kU[1]}, SpectralSet{kV[0]}};
    EXPECT_NO_THROW(ok.validate(m, 1e-6));
    const BetheParams same{SpectralSet{kU[0], kU[0]}, SpectralSet{kV[0]}};
    EXPECT_THROW(same.validate(m, 1e-6), std::invalid_argument);
    const BetheParams shifted{SpectralSet{kU[0]}, SpectralSet{kU[0] + m.c()}};
    EXPECT_THROW(shifted.validate(m, 1e-6), std::logic_error); // PoleError or invalid_argument
    const BetheParams on_xi{SpectralSet{m.inhomogeneities()[1]}, SpectralSet{}};
    EXPECT_THROW(on_xi.validate(m, 1e-6), std::logic_error);
}

TEST(SemiOnshell, SingleExcitationRepresentation) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const cplx u = kU[0];
    const cplx v = semi_onshell_v(m, u);
    const std::vector<cplx> us{u};
    const std::vector<cplx> vs{v};
    EXPECT_LT(std::abs(m.lambda(u) - m.kappa() * m.coupling().f(v, u)), 1e-13);
    EXPECT_LT(relative_difference(semi_onshell_rep(t, us, vs).vector, gbv(t, us, vs).vector), 1e-13);
    // off the first family the representation is a different vector
    const std::vector<cplx> off{v + 0.3};
    EXPECT_GT(relative_difference(semi_onshell_rep(t, us, off).vector, gbv(t, us, off).vector), 1e-3);
}

TEST(MultiAction, MatchesFormula) {
    const ChainModel m = make_model(3);
    const Monodromy t(m, Variant::twisted);
    for (std::size_t a = 1; a <= 3; ++a) {
        const auto u = first(kU, a);
        EXPECT_LT(relative_difference(bg_multi_action(t, u).vector, bg_multi_formula(t, u).vector), 1e-12) << a;
    }
}

TEST(MultiAction, EmptySectorReadsAsZero) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const VectorPair p = multi_action_sides(t, kU);
    EXPECT_TRUE(p.vacuous());
    EXPECT_LT(p.residual(), 1e-13);
}

TEST(SemiOnshellDecomposition, PiecesSumToTheAction) {
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const cplx u = kU[0];
    const cplx v = semi_onshell_v(m, u);
    const std::vector<cplx> us{u};
    const std::vector<cplx> vs{v};
    const cplx z{-0.93, 0.58};
    const cplx pre = m.beta() * m.kappa() * m.kappa() * m.coupling().g(v, u);
    const StateVector lhs = b_good(t, z) * (pre * gbv(t, us, vs).vector);
    const SemiOnshellDecomposition d = bg_semi_onshell_decomposition(t, us, vs, z);
    EXPECT_LT(relative_difference(lhs, d.m1 + d.m2), 1e-12);
}

TEST(SemiOnshellDecomposition, SecondPieceIsAPointSplittingLimit) {
    // M2 against the split expression at z2 = z1 +- delta, averaged so the
    // O(delta) term cancels.
    const ChainModel m = make_model(2);
    const Monodromy t(m, Variant::twisted);
    const Coupling& c = m.coupling();
    const cplx u = kU[0];
    const cplx v = semi_onshell_v(m, u);
    const std::vector<cplx> us{u};
    const std::vector<cplx> vs{v};
    const cplx z1{-0.93, 0.58};
    auto split = [&](cplx z2) {
        const std::vector<cplx> u2{u, z1};
        const std::vector<cplx> v2{v, z1 - m.c(), z2};
        const cplx w = std::pow(m.beta(), 1.0) * std::pow(m.kappa(), 5.0) * c.g(v, u) * c.g(v, z1) * c.g(u, z2) *
                       c.g(z1, z2) / c.h(u, z1);
        return w * gbv(t, u2, v2).vector;
    };
    const double delta = 1e-5;
    const StateVector avg = 0.5 * (split(z1 + delta) + split(z1 - delta));
    const StateVector m2 = bg_semi_onshell_decomposition(t, us, vs, z1).m2;
    EXPECT_LT(relative_difference(avg, m2), 1e-8);
}
