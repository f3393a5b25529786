#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gl3ba/monodromy.hpp"

using namespace gl3ba;

namespace {

const cplx kKappa{0.4, 0.1};
const cplx kBeta{0.7, -0.2};

ChainModel make_model(int length, cplx c = 1.0) {
    const std::vector<cplx> xi{cplx{0.13, -0.41}, cplx{-0.77, 0.29}, cplx{0.52, 0.66}, cplx{-0.2, -0.9}};
    return ChainModel(HilbertSpace(length), SpectralSet(std::vector<cplx>(xi.begin(), xi.begin() + length)), kKappa,
                      kBeta, Coupling(c));
}

Matrix unit3(int r, int c) {
    Matrix e = Matrix::Zero(3, 3);
    e(r - 1, c - 1) = 1.0;
    return e;
}

// T^0_ij(u) = D_ii sum_k R_02(u)_ik R_01(u)_kj with R_0s(u)_ab = delta_ab + g(u,xi_s) E_ba on site s.
Matrix t0_oracle_L2(const ChainModel& m, cplx u, int i, int j) {
    const HilbertSpace& s = m.space();
    const Coupling& c = m.coupling();
    const Matrix id = Matrix::Identity(s.dim(), s.dim());
    auto r = [&](int site, int a, int b) {
        Matrix out = (a == b) ? id : Matrix(Matrix::Zero(s.dim(), s.dim()));
        return Matrix(out + c.g(u, m.inhomogeneities()[static_cast<std::size_t>(site - 1)]) *
                                embed_one_site(unit3(b, a), site, s).matrix());
    };
    Matrix acc = Matrix::Zero(s.dim(), s.dim());
    for (int k = 1; k <= 3; ++k) acc += r(2, i, k) * r(1, k, j);
    return (i == 2 ? m.kappa() : cplx{1.0, 0.0}) * acc;
}

double rel(const Matrix& x, const Matrix& y) { return (x - y).norm() / std::max(1.0, y.norm()); }

} // namespace

TEST(ChainModel, RejectsBadParameters) {
    const HilbertSpace s(2);
    const SpectralSet xi{0.1, 0.9};
    EXPECT_THROW(ChainModel(s, xi, 1.0, kBeta, Coupling(1.0)), std::invalid_argument);
    EXPECT_THROW(ChainModel(s, xi, kKappa, 0.0, Coupling(1.0)), std::invalid_argument);
    EXPECT_THROW(ChainModel(s, SpectralSet{0.1}, kKappa, kBeta, Coupling(1.0)), std::invalid_argument);
    EXPECT_THROW(ChainModel(s, SpectralSet{0.1, 0.1}, kKappa, kBeta, Coupling(1.0)), std::invalid_argument);
    try {
        ChainModel(s, xi, 1.0, kBeta, Coupling(1.0));
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("twist"), std::string::npos);
    }
}

TEST(Monodromy, SingleSiteClosedForm) {
    const ChainModel m = make_model(1);
    const cplx u{0.9, 0.35};
    const MonodromyBlocks t0 = build_T0(m, u);
    const cplx g = m.coupling().g(u, m.inhomogeneities()[0]);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            const Matrix expect = (i == 2 ? m.kappa() : cplx{1.0, 0.0}) *
                                  (Matrix((i == j ? 1.0 : 0.0) * Matrix::Identity(3, 3)) + g * unit3(j, i));
            EXPECT_LT(rel(t0(i, j).matrix(), expect), 1e-15) << i << j;
        }
    }
    EXPECT_THROW(build_T0(m, m.inhomogeneities()[0]), PoleError);
}

TEST(Monodromy, TwoSiteProductOrder) {
    const ChainModel m = make_model(2);
    const cplx u{-0.4, 1.1};
    const MonodromyBlocks t0 = build_T0(m, u);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) EXPECT_LT(rel(t0(i, j).matrix(), t0_oracle_L2(m, u, i, j)), 1e-14);
    }
}

TEST(Monodromy, TwistIsConjugation) {
    const ChainModel m = make_model(2);
    const cplx u{0.3, -0.7};
    const MonodromyBlocks t0 = build_T0(m, u);
    const MonodromyBlocks t = build_T(m, u);
    Eigen::Matrix3cd k = Eigen::Matrix3cd::Identity();
    k(1, 2) = m.beta() / (1.0 - m.kappa());
    const Eigen::Matrix3cd kinv = k.inverse();
    const Index d = m.space().dim();
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            Matrix expect = Matrix::Zero(d, d);
            for (int a = 1; a <= 3; ++a) {
                for (int b = 1; b <= 3; ++b) expect += k(i - 1, a - 1) * kinv(b - 1, j - 1) * t0(a, b).matrix();
            }
            EXPECT_LT(rel(t(i, j).matrix(), expect), 1e-14) << i << j;
        }
    }
}

TEST(Monodromy, VacuumAction) {
    for (int length : {1, 2, 3}) {
        const ChainModel m = make_model(length);
        const cplx u{1.7, 0.2};
        const StateVector vac = vacuum(m.space());
        const MonodromyBlocks t0 = build_T0(m, u);
        const MonodromyBlocks t = build_T(m, u);
        cplx lambda{1.0, 0.0};
        for (cplx x : m.inhomogeneities()) lambda *= (u - x + 1.0) / (u - x);
        EXPECT_LT(relative_difference(t0(1, 1) * vac, lambda * vac), 1e-14);
        EXPECT_LT(relative_difference(t(2, 2) * vac, m.kappa() * vac), 1e-14);
        EXPECT_LT(relative_difference(t(3, 3) * vac, vac), 1e-14);
        EXPECT_LT(relative_difference(t(2, 3) * vac, m.beta() * vac), 1e-14);
        for (auto [i, j] : {std::pair{2, 1}, {3, 1}, {3, 2}, {2, 3}}) EXPECT_LT((t0(i, j) * vac).norm(), 1e-15);
        for (auto [i, j] : {std::pair{2, 1}, {3, 1}, {3, 2}}) EXPECT_LT((t(i, j) * vac).norm(), 1e-15);
    }
}

TEST(Monodromy, RttHoldsForAllVariants) {
    for (int length : {2, 3}) {
        const ChainModel m = make_model(length);
        const cplx u{0.8, 0.6};
        const cplx v{-1.1, 0.15};
        for (Variant var : {Variant::plain, Variant::twisted, Variant::hatted}) {
            const Monodromy mono(m, var);
            EXPECT_LT(rtt_residual(mono.at(u), mono.at(v), u, v, m.coupling()), 1e-12) << to_string(var);
        }
    }
}

TEST(Monodromy, RttDetectsABrokenMatrix) {
    const ChainModel m = make_model(2);
    const cplx u{0.8, 0.6};
    const cplx v{-1.1, 0.15};
    MonodromyBlocks tu = build_T0(m, u);
    tu(1, 2) *= cplx{1.01, 0.0};
    EXPECT_GT(rtt_residual(tu, build_T0(m, v), u, v, m.coupling()), 1e-4);
}

TEST(Monodromy, YangBaxter) {
    const Coupling c(cplx{0.6, 0.8});
    const cplx u{0.3, 0.1};
    const cplx v{-0.9, 0.4};
    const cplx w{1.2, -0.5};
    EXPECT_LT(ybe_residual(u, v, w, c), 1e-13);
    // wrong ordering is not an identity
    const HilbertSpace three(3);
    const Matrix r12 = embed_two_site(r_matrix(u, v, c), 1, 2, three).matrix();
    const Matrix r13 = embed_two_site(r_matrix(u, w, c), 1, 3, three).matrix();
    const Matrix r23 = embed_two_site(r_matrix(v, w, c), 2, 3, three).matrix();
    EXPECT_GT((r12 * r23 * r13 - r13 * r23 * r12).norm() / (r12 * r23 * r13).norm(), 1e-3);
}

TEST(Monodromy, TransferMatricesCommute) {
    const ChainModel m = make_model(3);
    for (Variant var : {Variant::plain, Variant::twisted}) {
        const Monodromy mono(m, var);
        const LinearOperator a = mono.at(cplx{0.4, 0.9}).trace();
        const LinearOperator b = mono.at(cplx{-0.6, -1.3}).trace();
        EXPECT_LT(commutator_residual(a, b), 1e-12);
    }
}

TEST(Comatrix, MinorsAreAntisymmetricInRows) {
    const ChainModel m = make_model(2);
    const cplx u{0.5, 0.8};
    const MonodromyBlocks t = build_T(m, u);
    const MonodromyBlocks s = build_T(m, u - m.c());
    for (auto [k1, k2] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
        const Matrix x = quantum_minor(t, s, 1, 3, k1, k2).matrix();
        const Matrix y = quantum_minor(t, s, 3, 1, k1, k2).matrix();
        EXPECT_LT((x + y).norm() / x.norm(), 1e-13);
    }
}

TEST(Comatrix, QuantumDeterminantValue) {
    for (int length : {1, 2, 3}) {
        const ChainModel m = make_model(length);
        const cplx u{0.45, -1.25};
        for (Variant var : {Variant::plain, Variant::twisted}) {
            const Monodromy mono(m, var);
            const QdetResult q = qdet_check(mono, u);
            EXPECT_LT(q.residual, 1e-12);
            EXPECT_LT(std::abs(q.qdet - m.lambda(u) * m.kappa()) / std::abs(q.qdet), 1e-13) << length;
        }
    }
}

TEST(Comatrix, HattedVacuumEigenvalues) {
    const ChainModel m = make_model(2);
    const Monodromy hat(m, Variant::hatted);
    const cplx z{1.4, 0.35};
    const StateVector vac = vacuum(m.space());
    const MonodromyBlocks& t = hat.at(z);
    const cplx expect[3] = {m.lambda(z) * m.kappa(), m.lambda(z), m.kappa()};
    for (int j = 1; j <= 3; ++j) {
        EXPECT_LT(relative_difference(t(j, j) * vac, expect[j - 1] * vac), 1e-13);
        EXPECT_LT(std::abs(hat.vacuum_eigenvalue(j, z) - expect[j - 1]), 1e-14);
    }
    for (auto [i, j] : {std::pair{2, 1}, {3, 1}, {3, 2}}) EXPECT_LT((t(i, j) * vac).norm(), 1e-13);
}

TEST(BGood, FormsAgreeAndCommute) {
    for (int length : {2, 3}) {
        const ChainModel m = make_model(length);
        const Monodromy mono(m, Variant::twisted);
        const cplx u{0.7, 0.45};
        const cplx v{-0.35, -0.8};
        const LinearOperator bu = b_good(mono, u);
        const LinearOperator bv = b_good(mono, v);
        const LinearOperator direct = b_good_direct(mono.at(u), mono.at(u - m.c()));
        EXPECT_LT(relative_difference(direct.matrix(), bu.matrix()), 1e-12);
        EXPECT_LT(commutator_residual(bu, bv), 1e-11);
    }
}

TEST(BGood, UntwistedAnnihilatesVacuum) {
    const ChainModel m = make_model(3);
    const Monodromy plain(m, Variant::plain);
    const cplx u{0.7, 0.45};
    const LinearOperator b = b_good(plain, u);
    EXPECT_LT((b * vacuum(m.space())).norm() / b.norm(), 1e-14);
}

TEST(BGood, VacuumActionIsTwoTerms) {
    // Only T12 and T13 can create one excitation out of |0>, with T23|0> = beta|0>.
    const ChainModel m = make_model(2);
    const Monodromy mono(m, Variant::twisted);
    const cplx z{-0.25, 1.05};
    const StateVector vac = vacuum(m.space());
    const StateVector lhs = b_good(mono, z) * vac;
    const StateVector rhs = (m.beta() * m.beta()) * (mono(1, 2, z) * vac) +
                            (m.beta() * (m.lambda(z) - m.kappa())) * (mono(1, 3, z) * vac);
    EXPECT_LT(relative_difference(lhs, rhs), 1e-13);
}

TEST(Monodromy, CacheReturnsSameBlocks) {
    const ChainModel m = make_model(2);
    const Monodromy mono(m, Variant::twisted);
    const cplx z{0.1, 0.2};
    EXPECT_EQ(&mono.at(z), &mono.at(z));
    EXPECT_EQ(mono.at(z)(1, 2).matrix(), build_T(m, z)(1, 2).matrix());
}
