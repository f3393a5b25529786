#pragma once

// Domain-wall partition function K_n and the partition-sum identities it
// satisfies.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gl3ba/kernel.hpp"
#include "gl3ba/partitions.hpp"

namespace gl3ba {

namespace detail {

inline cplx vandermonde_g(const Coupling& c, std::span<const cplx> x, std::span<const cplx> y) {
    cplx acc{1.0, 0.0};
    const std::size_t n = x.size();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            acc *= c.g(x[j], x[k]) * c.g(y[k], y[j]);
        }
    }
    return acc;
}

inline void require_same_size(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("dwpf: sets must have equal cardinality");
    }
}

} // namespace detail

/// K_n(x|y) by the Izergin determinant
///   h(x,y) prod_{j<k} g(x_j,x_k) g(y_k,y_j) det[g(x_j,y_k)/h(x_j,y_k)].
/// K_0 = 1.
inline cplx dwpf(std::span<const cplx> x, std::span<const cplx> y, const Coupling& c) {
    detail::require_same_size(x, y);
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n == 0) return {1.0, 0.0};
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const cplx hv = c.h(x[j], y[k]);
            if (hv == cplx{0.0, 0.0}) {
                throw PoleError("dwpf: h vanishes inside determinant", x[j], y[k]);
            }
            m(j, k) = c.g(x[j], y[k]) / hv;
        }
    }
    return h_prod(c, x, y) * detail::vandermonde_g(c, x, y) * m.determinant();
}

/// K_n(x|y) / g(x,y), where g(x,y) is the product over all pairs.
///
/// Each determinant row is multiplied by prod_l h(x_j,y_l)/g(x_j,y_l), which
/// turns the entries into polynomials; the result is therefore regular at
/// x_j = y_k and at x_j = y_k - c and only has poles inside x or inside y.
inline cplx dwpf_over_g(std::span<const cplx> x, std::span<const cplx> y, const Coupling& c) {
    detail::require_same_size(x, y);
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n == 0) return {1.0, 0.0};
    const cplx cc = c.value();
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            cplx entry{1.0, 0.0};
            for (Eigen::Index l = 0; l < n; ++l) {
                if (l == k) continue;
                const cplx d = x[j] - y[l];
                entry *= d * (d + cc) / (cc * cc);
            }
            m(j, k) = entry;
        }
    }
    return detail::vandermonde_g(c, x, y) * m.determinant();
}

/// Two sides of the partition identity
///   sum_{#x_I = n} K_n(x_I|y) f(x_II, x_I)
///     = sum_{y => y_I,y_II} (-1)^{n-#y_I} f(y_I, y_II) f(x, y_I),
/// valid for #x >= #y = n.
struct IdentitySides {
    cplx lhs;
    cplx rhs;
    double scale; ///< sum of |terms| on the right, for scaled comparisons
};

/// Right-hand side above; defined for any #x.
inline std::pair<cplx, double> identity_rhs_sum(std::span<const cplx> x, std::span<const cplx> y,
                                                const Coupling& c) {
    const std::size_t n = y.size();
    cplx sum{0.0, 0.0};
    double scale = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        for_each_split(y, k, [&](const Split& s) {
            const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
            const cplx term = sign * f_prod(c, s.first, s.second) * f_prod(c, x, s.first);
            sum += term;
            scale += std::abs(term);
        });
    }
    return {sum, scale};
}

inline IdentitySides identity_A1_sides(std::span<const cplx> x, std::span<const cplx> y,
                                       const Coupling& c) {
    if (x.size() < y.size()) {
        throw std::invalid_argument("identity_A1_sides: requires #x >= #y");
    }
    cplx lhs{0.0, 0.0};
    for_each_split(x, y.size(), [&](const Split& s) {
        lhs += dwpf(s.first, y, c) * f_prod(c, s.second, s.first);
    });
    auto [rhs, scale] = identity_rhs_sum(x, y, c);
    return {lhs, rhs, scale};
}

/// The matrix [ f(y_j, y_j-bar) f(x, y_j) / h(y_j, y_k) - delta_jk ]_{j,k=1..n}.
inline Eigen::MatrixXcd identity_A2_matrix(std::span<const cplx> x, std::span<const cplx> y, const Coupling& c) {
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        cplx row{1.0, 0.0};
        for (Eigen::Index l = 0; l < n; ++l) {
            if (l != j) row *= c.f(y[j], y[l]);
        }
        row *= f_prod(c, x, y[j]);
        for (Eigen::Index k = 0; k < n; ++k) {
            m(j, k) = row / c.h(y[j], y[k]) - (j == k ? 1.0 : 0.0);
        }
    }
    return m;
}

/// det_n of the matrix above; equals the right side of the partition
/// identity for any #x, and vanishes when #x < #y.
inline cplx identity_A2_det(std::span<const cplx> x, std::span<const cplx> y, const Coupling& c) {
    if (y.empty()) return {1.0, 0.0};
    return identity_A2_matrix(x, y, c).determinant();
}

/// Hadamard bound prod_j |row_j| of the same matrix: the natural scale for
/// an absolute test of the vanishing case.
inline double identity_A2_scale(std::span<const cplx> x, std::span<const cplx> y, const Coupling& c) {
    if (y.empty()) return 1.0;
    const Eigen::MatrixXcd m = identity_A2_matrix(x, y, c);
    double s = 1.0;
    for (Eigen::Index j = 0; j < m.rows(); ++j) s *= m.row(j).norm();
    return s;
}

} // namespace gl3ba
