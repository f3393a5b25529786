#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "gl3ba/dwpf.hpp"
#include "gl3ba/kernel.hpp"
#include "gl3ba/partitions.hpp"

using namespace gl3ba;

namespace {

std::vector<cplx> random_points(std::mt19937_64& gen, std::size_t n, double radius = 2.0) {
    // Rejection keeps every pair at least 0.3 apart and away from the +-c
    // shifts, so no test point sits near a pole.
    std::uniform_real_distribution<double> d(-radius, radius);
    std::vector<cplx> out;
    while (out.size() < n) {
        const cplx z{d(gen), d(gen)};
        bool ok = true;
        for (cplx w : out) {
            for (double s : {0.0, 1.0, -1.0}) ok = ok && std::abs(z - w + s) > 0.3;
        }
        if (ok) out.push_back(z);
    }
    return out;
}

// <down...down| B(x_1) ... B(x_n) |up...up> for the gl2 chain with
// inhomogeneities y, built from scratch: aux space slowest, R_{0k} = I + g P_{0k},
// T(u) = R_{0n}(u,y_n) ... R_{01}(u,y_1), B = T_12.
cplx six_vertex_domain_wall(const std::vector<cplx>& x, const std::vector<cplx>& y, cplx c) {
    const int n = static_cast<int>(y.size());
    const Eigen::Index dq = Eigen::Index{1} << n;
    const Eigen::Index full = 2 * dq;
    auto bit = [&](Eigen::Index state, int k) { return (state >> (n - k)) & 1; }; // site k in 1..n
    auto swap_aux = [&](int k) {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(full, full);
        for (Eigen::Index col = 0; col < full; ++col) {
            const Eigen::Index aux = col / dq;
            const Eigen::Index q = col % dq;
            const Eigen::Index sk = bit(q, k);
            const Eigen::Index q2 = (q & ~(Eigen::Index{1} << (n - k))) | (aux << (n - k));
            p(sk * dq + q2, col) = 1.0;
        }
        return p;
    };
    auto b_op = [&](cplx u) {
        Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(full, full);
        for (int k = 1; k <= n; ++k) {
            const Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(full, full) + (c / (u - y[k - 1])) * swap_aux(k);
            t = r * t;
        }
        return Eigen::MatrixXcd(t.block(0, dq, dq, dq));
    };
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(dq);
    state(0) = 1.0;
    for (auto it = x.rbegin(); it != x.rend(); ++it) state = b_op(*it) * state;
    return state(dq - 1);
}

} // namespace

TEST(Coupling, ElementaryFunctions) {
    const Coupling c(cplx{1.0, 0.0});
    EXPECT_NEAR(std::abs(c.g(2.0, 0.5) - 1.0 / 1.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.f(2.0, 0.5) - 2.5 / 1.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.h(2.0, 0.5) - 2.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.inv_g(2.0, 0.5) - 1.5), 0.0, 1e-15);

    const Coupling ci(cplx{0.0, 2.0});
    const cplx u{0.3, 0.1};
    const cplx v{-0.2, 0.4};
    EXPECT_NEAR(std::abs(ci.f(u, v) - ci.h(u, v) * ci.g(u, v)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ci.f(u, v) - 1.0 - ci.g(u, v)), 0.0, 1e-15);
}

TEST(Coupling, PolesAndZeroCoupling) {
    const Coupling c(cplx{1.0, 0.0});
    EXPECT_THROW(c.g(0.7, 0.7), PoleError);
    EXPECT_THROW(c.f(0.7, 0.7), PoleError);
    EXPECT_NO_THROW(c.h(0.7, 0.7));
    EXPECT_THROW(Coupling(cplx{0.0, 0.0}), std::invalid_argument);
    try {
        c.g(0.25, 0.25);
    } catch (const PoleError& e) {
        EXPECT_EQ(e.left(), cplx(0.25));
        EXPECT_EQ(e.right(), cplx(0.25));
    }
}

TEST(Coupling, ProductsOverSets) {
    const Coupling c(cplx{1.0, 0.0});
    const std::vector<cplx> x{0.1, cplx{0.5, 0.2}};
    const std::vector<cplx> y{cplx{-0.7, 0.3}, 1.3, cplx{0.0, -0.9}};
    cplx expect{1.0, 0.0};
    for (cplx a : x) {
        for (cplx b : y) expect *= c.f(a, b);
    }
    EXPECT_NEAR(std::abs(f_prod(c, x, y) - expect), 0.0, 1e-14);
    EXPECT_EQ(f_prod(c, std::span<const cplx>{}, y), cplx(1.0));
}

TEST(SpectralSet, ValidateDistinct) {
    SpectralSet ok{0.0, 1.0, cplx{0.0, 1.0}};
    EXPECT_NO_THROW(ok.validate_distinct(1e-6));
    SpectralSet bad{0.0, 1.0, 1e-9};
    EXPECT_THROW(bad.validate_distinct(1e-6), std::invalid_argument);
    EXPECT_EQ(ok.shifted(1.0)[2], cplx(1.0, 1.0));
    EXPECT_EQ(ok.without(0).size(), 2u);
}

TEST(Partitions, Counts) {
    EXPECT_EQ(for_each_partition(2, {1, 1}, [](const Partition&) {}), 2u);
    EXPECT_EQ(for_each_partition(3, {1, 1, 1}, [](const Partition&) {}), 6u);
    EXPECT_EQ(for_each_partition(4, {2, 2}, [](const Partition&) {}), 6u);
    EXPECT_EQ(for_each_partition(5, {2, 0, 3}, [](const Partition&) {}), 10u);
    EXPECT_EQ(for_each_partition(0, {0, 0}, [](const Partition&) {}), 1u);
    const std::vector<std::size_t> k{2, 1, 2};
    EXPECT_EQ(multinomial(k), 30u);
}

TEST(Partitions, CardinalityMismatchThrows) {
    EXPECT_THROW(enumerate_partitions(3, {1, 1}), std::invalid_argument);
    EXPECT_THROW(enumerate_partitions(2, {2, 1}), std::invalid_argument);
}

TEST(Partitions, DistinctAndLexicographic) {
    std::set<std::vector<int>> seen;
    std::vector<int> last;
    for_each_partition(5, {2, 1, 2}, [&](const Partition& p) {
        EXPECT_TRUE(seen.insert(p.assignment()).second);
        if (!last.empty()) EXPECT_LT(last, p.assignment());
        last = p.assignment();
        for (int label = 0; label < 3; ++label) {
            EXPECT_EQ(p.indices(label).size(), p.cardinalities()[static_cast<std::size_t>(label)]);
        }
    });
    EXPECT_EQ(seen.size(), 30u);
}

TEST(Dwpf, BaseCases) {
    const Coupling c(cplx{1.0, 0.0});
    EXPECT_EQ(dwpf(std::span<const cplx>{}, std::span<const cplx>{}, c), cplx(1.0));
    const std::vector<cplx> x{cplx{0.3, 0.4}};
    const std::vector<cplx> y{cplx{-0.5, 0.1}};
    EXPECT_NEAR(std::abs(dwpf(x, y, c) - c.g(x[0], y[0])), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(dwpf_over_g(x, y, c) - 1.0), 0.0, 1e-15);
    const std::vector<cplx> y2{0.0, 1.0};
    EXPECT_THROW(dwpf(x, y2, c), std::invalid_argument);
}

TEST(Dwpf, MatchesSixVertexDomainWallAmplitude) {
    std::mt19937_64 gen(7);
    for (cplx cval : {cplx{1.0, 0.0}, cplx{0.6, -0.8}}) {
        const Coupling c(cval);
        for (std::size_t n = 1; n <= 4; ++n) {
            const auto x = random_points(gen, n);
            const auto y = random_points(gen, n);
            const cplx k = dwpf(x, y, c);
            const cplx oracle = six_vertex_domain_wall(x, y, cval);
            EXPECT_LT(std::abs(k - oracle) / std::abs(oracle), 1e-12) << "n=" << n;
        }
    }
}

TEST(Dwpf, OverGIsRegularAndConsistent) {
    std::mt19937_64 gen(11);
    const Coupling c(cplx{1.0, 0.0});
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto x = random_points(gen, n);
        const auto y = random_points(gen, n);
        const cplx ratio = dwpf(x, y, c) / g_prod(c, x, y);
        EXPECT_LT(std::abs(dwpf_over_g(x, y, c) - ratio) / std::abs(ratio), 1e-12);
        // finite when x_1 hits y_1 exactly
        auto xs = x;
        xs[0] = y[0];
        EXPECT_TRUE(std::isfinite(std::abs(dwpf_over_g(xs, y, c))));
    }
}

TEST(Dwpf, SymmetricInEachSet) {
    std::mt19937_64 gen(3);
    const Coupling c(cplx{1.0, 0.0});
    auto x = random_points(gen, 4);
    auto y = random_points(gen, 4);
    const cplx k = dwpf(x, y, c);
    std::swap(x[0], x[3]);
    std::swap(x[1], x[2]);
    EXPECT_LT(std::abs(dwpf(x, y, c) - k) / std::abs(k), 1e-12);
    std::rotate(y.begin(), y.begin() + 1, y.end());
    EXPECT_LT(std::abs(dwpf(x, y, c) - k) / std::abs(k), 1e-12);
}

TEST(Dwpf, DecaysLikeInverseOfOneArgument) {
    std::mt19937_64 gen(5);
    const Coupling c(cplx{1.0, 0.0});
    for (std::size_t n = 1; n <= 3; ++n) {
        auto x = random_points(gen, n);
        const auto y = random_points(gen, n);
        x[n - 1] = cplx{1e3, 0.0};
        const double k3 = std::abs(dwpf(x, y, c));
        x[n - 1] = cplx{1e4, 0.0};
        const double k4 = std::abs(dwpf(x, y, c));
        EXPECT_NEAR(k4 / k3, 0.1, 2e-3) << "n=" << n;
    }
}

// Residue of K_n in x_n at y_n from a trapezoid-rule contour integral on a
// small circle, compared with c f(x-bar, y_n) f(y_n, y-bar) K_{n-1}.
TEST(Dwpf, ResidueByContourIntegral) {
    std::mt19937_64 gen(13);
    const Coupling c(cplx{1.0, 0.0});
    for (std::size_t n = 1; n <= 4; ++n) {
        auto x = random_points(gen, n);
        const auto y = random_points(gen, n);
        const cplx yn = y[n - 1];
        const std::vector<cplx> xbar(x.begin(), x.end() - 1);
        const std::vector<cplx> ybar(y.begin(), y.end() - 1);
        constexpr int kNodes = 64;
        const double radius = 0.05;
        cplx residue{0.0, 0.0};
        for (int k = 0; k < kNodes; ++k) {
            const cplx d = std::polar(radius, 2.0 * std::numbers::pi * k / kNodes);
            x[n - 1] = yn + d;
            residue += d * dwpf(x, y, c);
        }
        residue /= static_cast<double>(kNodes);
        const cplx expect = c.value() * f_prod(c, xbar, yn) * f_prod(c, yn, ybar) * dwpf(xbar, ybar, c);
        EXPECT_LT(std::abs(residue - expect) / std::abs(expect), 1e-10) << "n=" << n;
    }
}

TEST(Dwpf, PartitionIdentityOneElement) {
    // n = 1: sum_j g(x_j,y) f(x_j-bar, x_j) = f(x,y) - 1, by partial fractions.
    std::mt19937_64 gen(17);
    const Coupling c(cplx{1.0, 0.0});
    for (std::size_t m = 1; m <= 4; ++m) {
        const auto x = random_points(gen, m);
        const auto y = random_points(gen, 1);
        const IdentitySides s = identity_A1_sides(x, y, c);
        const cplx oracle = f_prod(c, x, y[0]) - 1.0;
        EXPECT_LT(std::abs(s.lhs - oracle) / std::max(1.0, std::abs(oracle)), 1e-12);
        EXPECT_LT(std::abs(s.rhs - oracle) / std::max(1.0, std::abs(oracle)), 1e-12);
        EXPECT_LT(std::abs(identity_A2_det(x, y, c) - oracle) / std::max(1.0, std::abs(oracle)), 1e-12);
    }
}

TEST(Dwpf, PartitionIdentityAndDeterminant) {
    std::mt19937_64 gen(19);
    const Coupling c(cplx{0.8, 0.6});
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t m = n; m <= 5; ++m) {
            const auto x = random_points(gen, m);
            const auto y = random_points(gen, n);
            const IdentitySides s = identity_A1_sides(x, y, c);
            EXPECT_LT(std::abs(s.lhs - s.rhs) / s.scale, 1e-11) << m << "," << n;
            EXPECT_LT(std::abs(identity_A2_det(x, y, c) - s.rhs) / s.scale, 1e-11) << m << "," << n;
        }
    }
}

TEST(Dwpf, DeterminantVanishesForSmallerFirstSet) {
    std::mt19937_64 gen(23);
    const Coupling c(cplx{1.0, 0.0});
    for (std::size_t n = 2; n <= 5; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            const auto x = random_points(gen, m);
            const auto y = random_points(gen, n);
            const double scale = identity_A2_scale(x, y, c);
            EXPECT_LT(std::abs(identity_A2_det(x, y, c)) / scale, 1e-12) << m << "," << n;
        }
    }
    EXPECT_THROW(identity_A1_sides(random_points(gen, 1), random_points(gen, 2), c), std::invalid_argument);
}
