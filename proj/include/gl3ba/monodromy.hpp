#pragma once

// The gl3-invariant R-matrix, the inhomogeneous fundamental chain with its
// diagonal and minimal twists, quantum minors, the comatrix, the hatted
// monodromy matrix and the composite operator B^g.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "gl3ba/hilbert.hpp"
#include "gl3ba/kernel.hpp"

namespace gl3ba {

/// R(u,v) = I (x) I + g(u,v) P on C^3 (x) C^3.
inline Matrix r_matrix(cplx u, cplx v, const Coupling& c) {
    return Matrix::Identity(9, 9) + c.g(u, v) * permutation9();
}

/// Which monodromy matrix a set of blocks represents.
enum class Variant {
    plain,   ///< T^0(u) = diag(1, kappa, 1) R_{0L} ... R_{01}
    twisted, ///< T(u) = K T^0(u) K^{-1}, K = I + beta/(1-kappa) E_23
    hatted,  ///< hat T(u) built from the quantum comatrix of T(u)
};

inline const char* to_string(Variant v) {
    switch (v) {
    case Variant::plain: return "plain";
    case Variant::twisted: return "twisted";
    case Variant::hatted: return "hatted";
    }
    return "?";
}

/// 3x3 array of operator-valued entries T_ij(u), addressed 1-based.
class MonodromyBlocks {
public:
    MonodromyBlocks(const HilbertSpace& space, Variant variant)
        : variant_(variant),
          blocks_{LinearOperator(space), LinearOperator(space), LinearOperator(space),
                  LinearOperator(space), LinearOperator(space), LinearOperator(space),
                  LinearOperator(space), LinearOperator(space), LinearOperator(space)} {}

    Variant variant() const noexcept { return variant_; }
    const HilbertSpace& space() const noexcept { return blocks_[0].space(); }

    const LinearOperator& operator()(int i, int j) const { return blocks_.at(slot(i, j)); }
    LinearOperator& operator()(int i, int j) { return blocks_.at(slot(i, j)); }

    /// tr T(u) = T_11 + T_22 + T_33.
    LinearOperator trace() const { return (*this)(1, 1) + (*this)(2, 2) + (*this)(3, 3); }

    /// The 3d x 3d matrix with block (i,j) = T_ij (auxiliary index slowest).
    Matrix assembled() const {
        const Index d = space().dim();
        Matrix out(3 * d, 3 * d);
        for (int i = 1; i <= 3; ++i) {
            for (int j = 1; j <= 3; ++j) out.block((i - 1) * d, (j - 1) * d, d, d) = (*this)(i, j).matrix();
        }
        return out;
    }

private:
    static std::size_t slot(int i, int j) {
        if (i < 1 || i > 3 || j < 1 || j > 3) throw std::out_of_range("monodromy index out of range");
        return static_cast<std::size_t>(3 * (i - 1) + (j - 1));
    }

    Variant variant_;
    std::array<LinearOperator, 9> blocks_;
};

/// Consistency failure between two independent evaluations of one object.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fundamental inhomogeneous chain with vacuum eigenvalues
/// lambda_1 = prod_k f(u, xi_k), lambda_2 = kappa, lambda_3 = 1 and the
/// minimal twist parameter beta.
class ChainModel {
public:
    ChainModel(const HilbertSpace& space, SpectralSet xi, cplx kappa, cplx beta, Coupling c)
        : space_(space), xi_(std::move(xi)), kappa_(kappa), beta_(beta), c_(c) {
        if (static_cast<int>(xi_.size()) != space_.sites()) {
            throw std::invalid_argument("number of inhomogeneities must equal the chain length");
        }
        if (kappa_ == cplx{0.0, 0.0}) throw std::invalid_argument("kappa must be nonzero");
        if (std::abs(kappa_ - 1.0) < 1e-12) {
            throw std::invalid_argument(
                "kappa = 1 is not allowed: the minimal twist K = I + beta/(1-kappa) E_23 is singular");
        }
        if (beta_ == cplx{0.0, 0.0}) throw std::invalid_argument("beta must be nonzero");
        xi_.validate_distinct(kSeparationEpsilon * c_.magnitude());
        verify_vacuum();
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const SpectralSet& inhomogeneities() const noexcept { return xi_; }
    cplx kappa() const noexcept { return kappa_; }
    cplx beta() const noexcept { return beta_; }
    const Coupling& coupling() const noexcept { return c_; }
    cplx c() const noexcept { return c_.value(); }

    /// beta / (1 - kappa)
    cplx twist_coefficient() const noexcept { return beta_ / (1.0 - kappa_); }

    /// lambda(u) = lambda_1(u) = prod_k f(u, xi_k)
    cplx lambda(cplx u) const { return f_prod(c_, u, xi_.span()); }

    /// Vacuum eigenvalue lambda_j(u) of T^0 and T.
    cplx vacuum_eigenvalue(int j, cplx u) const {
        switch (j) {
        case 1: return lambda(u);
        case 2: return kappa_;
        case 3: return {1.0, 0.0};
        default: throw std::out_of_range("vacuum eigenvalue index");
        }
    }

    /// Throws PoleError if u hits an inhomogeneity (T(u) is singular there).
    void check_point(cplx u) const {
        for (cplx x : xi_) {
            if (std::abs(u - x) <= kPoleEpsilon * c_.magnitude()) {
                throw PoleError("monodromy evaluated at an inhomogeneity", u, x);
            }
        }
    }

private:
    void verify_vacuum() const;

    HilbertSpace space_;
    SpectralSet xi_;
    cplx kappa_;
    cplx beta_;
    Coupling c_;
};

/// T^0(u) = D R_{0L}(u,xi_L) ... R_{01}(u,xi_1), D = diag(1, kappa, 1).
inline MonodromyBlocks build_T0(const ChainModel& model, cplx u) {
    model.check_point(u);
    const HilbertSpace& space = model.space();
    const Index d = space.dim();
    std::array<Matrix, 9> m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m[3 * i + j] = (i == j) ? Matrix(Matrix::Identity(d, d)) : Matrix(Matrix::Zero(d, d));
        }
    }
    // (R_{0k})_{il} = delta_il + g(u, xi_k) E^{(k)}_{li}
    for (int k = 1; k <= space.sites(); ++k) {
        const cplx gk = model.coupling().g(u, model.inhomogeneities()[static_cast<std::size_t>(k - 1)]);
        std::array<Matrix, 9> next = m;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int l = 0; l < 3; ++l) {
                    next[3 * i + j] += gk * apply_site_unit(m[3 * l + j], l, i, k, space);
                }
            }
        }
        m = std::move(next);
    }
    MonodromyBlocks out(space, Variant::plain);
    for (int i = 1; i <= 3; ++i) {
        const cplx di = (i == 2) ? model.kappa() : cplx{1.0, 0.0};
        for (int j = 1; j <= 3; ++j) out(i, j) = LinearOperator(space, di * m[3 * (i - 1) + (j - 1)]);
    }
    return out;
}

/// T(u) = K T^0(u) K^{-1} with K = I + gamma E_23, gamma = beta/(1-kappa).
inline MonodromyBlocks twist(const MonodromyBlocks& t0, cplx gamma) {
    MonodromyBlocks left(t0.space(), Variant::twisted);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            left(i, j) = t0(i, j);
            if (i == 2) left(i, j) += gamma * t0(3, j);
        }
    }
    MonodromyBlocks out(t0.space(), Variant::twisted);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            out(i, j) = left(i, j);
            if (j == 3) out(i, j) -= gamma * left(i, 2);
        }
    }
    return out;
}

inline MonodromyBlocks build_T(const ChainModel& model, cplx u) {
    return twist(build_T0(model, u), model.twist_coefficient());
}

/// Quantum minor with rows (j1, j2) and columns (k1, k2):
///   t^{j1 j2}_{k1 k2}(u) = T_{j1 k1}(u) T_{j2 k2}(u-c) - T_{j1 k2}(u) T_{j2 k1}(u-c).
/// For R(u,v) = I + c/(u-v) P the column-antisymmetrised product taken in the
/// order T(u) T(u-c) is the one that is also antisymmetric in the rows.
inline LinearOperator quantum_minor(const MonodromyBlocks& at_u, const MonodromyBlocks& at_u_minus_c,
                                    int j1, int j2, int k1, int k2) {
    return at_u(j1, k1) * at_u_minus_c(j2, k2) - at_u(j1, k2) * at_u_minus_c(j2, k1);
}

namespace detail {

inline std::pair<int, int> complement(int j) {
    switch (j) {
    case 1: return {2, 3};
    case 2: return {1, 3};
    case 3: return {1, 2};
    default: throw std::out_of_range("complement index");
    }
}

} // namespace detail

/// Quantum comatrix tilde T_jk(u) = (-1)^{j+k} t^{bar k}_{bar j}(u)
/// (row indices bar k, column indices bar j), so that
/// tilde T(u-c) T(u) = qdet T(u) I.
inline MonodromyBlocks comatrix(const MonodromyBlocks& at_u, const MonodromyBlocks& at_u_minus_c) {
    MonodromyBlocks out(at_u.space(), at_u.variant());
    for (int j = 1; j <= 3; ++j) {
        for (int k = 1; k <= 3; ++k) {
            const auto [r1, r2] = detail::complement(k);
            const auto [c1, c2] = detail::complement(j);
            const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
            out(j, k) = sign * quantum_minor(at_u, at_u_minus_c, r1, r2, c1, c2);
        }
    }
    return out;
}

/// hat T_jk(u) = tilde T_{4-k, 4-j}(u): the comatrix transposed about the
/// secondary diagonal.
inline MonodromyBlocks hat_from_comatrix(const MonodromyBlocks& tilde) {
    MonodromyBlocks out(tilde.space(), Variant::hatted);
    for (int j = 1; j <= 3; ++j) {
        for (int k = 1; k <= 3; ++k) out(j, k) = tilde(4 - k, 4 - j);
    }
    return out;
}

inline MonodromyBlocks hat_T(const MonodromyBlocks& at_u, const MonodromyBlocks& at_u_minus_c) {
    return hat_from_comatrix(comatrix(at_u, at_u_minus_c));
}

/// Evaluates one variant of the monodromy matrix at arbitrary points and
/// caches the blocks by point. Safe for concurrent use.
class Monodromy {
public:
    Monodromy(const ChainModel& model, Variant variant)
        : model_(&model), variant_(variant),
          base_(variant == Variant::hatted ? std::make_unique<Monodromy>(model, Variant::twisted) : nullptr) {}

    /// Hatted matrix built over an explicit base variant (plain or twisted).
    static Monodromy hatted_over(const ChainModel& model, Variant base) {
        Monodromy m(model, Variant::hatted);
        m.base_ = std::make_unique<Monodromy>(model, base);
        return m;
    }

    Monodromy(Monodromy&& o) noexcept
        : model_(o.model_), variant_(o.variant_), base_(std::move(o.base_)), cache_(std::move(o.cache_)) {}

    const ChainModel& model() const noexcept { return *model_; }
    Variant variant() const noexcept { return variant_; }
    const Coupling& coupling() const noexcept { return model_->coupling(); }
    const HilbertSpace& space() const noexcept { return model_->space(); }

    /// Base monodromy of a hatted matrix; null otherwise.
    const Monodromy* base() const noexcept { return base_.get(); }

    const MonodromyBlocks& at(cplx u) const {
        const Key key{u.real(), u.imag()};
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
        }
        auto blocks = std::make_unique<MonodromyBlocks>(evaluate(u));
        std::lock_guard lock(mutex_);
        auto [it, inserted] = cache_.emplace(key, std::move(blocks));
        return *it->second;
    }

    const LinearOperator& operator()(int i, int j, cplx u) const { return at(u)(i, j); }

    /// Vacuum eigenvalue of the (i,i) entry of this variant.
    cplx vacuum_eigenvalue(int j, cplx z) const {
        const ChainModel& m = *model_;
        if (variant_ != Variant::hatted) return m.vacuum_eigenvalue(j, z);
        const cplx zc = z - m.c();
        switch (j) {
        case 1: return m.vacuum_eigenvalue(1, z) * m.vacuum_eigenvalue(2, zc);
        case 2: return m.vacuum_eigenvalue(1, z) * m.vacuum_eigenvalue(3, zc);
        case 3: return m.vacuum_eigenvalue(2, z) * m.vacuum_eigenvalue(3, zc);
        default: throw std::out_of_range("vacuum eigenvalue index");
        }
    }

private:
    using Key = std::pair<double, double>;

    MonodromyBlocks evaluate(cplx u) const {
        switch (variant_) {
        case Variant::plain: return build_T0(*model_, u);
        case Variant::twisted: return build_T(*model_, u);
        case Variant::hatted: return hat_T(base_->at(u), base_->at(u - model_->c()));
        }
        throw std::logic_error("unknown variant");
    }

    const ChainModel* model_;
    Variant variant_;
    std::unique_ptr<Monodromy> base_;
    mutable std::mutex mutex_;
    mutable std::map<Key, std::unique_ptr<MonodromyBlocks>> cache_;
};

inline void ChainModel::verify_vacuum() const {
    // Probe well away from the inhomogeneities.
    cplx probe{0.0, 0.0};
    for (cplx x : xi_) probe += x;
    probe = probe / static_cast<double>(xi_.size()) + cplx{3.1, 2.3} * c_.magnitude();
    const MonodromyBlocks t0 = build_T0(*this, probe);
    const MonodromyBlocks t = twist(t0, twist_coefficient());
    const StateVector vac = vacuum(space_);
    const double tol = 1e-10;
    auto expect = [&](const LinearOperator& op, cplx value, const char* what) {
        const Vector diff = (op * vac).amplitudes() - value * vac.amplitudes();
        if (diff.norm() > tol * std::max(1.0, std::abs(value))) {
            throw ConsistencyError(std::string("chain model vacuum check failed: ") + what);
        }
    };
    expect(t0(1, 1), lambda(probe), "T0_11 |0> = lambda |0>");
    expect(t0(2, 2), kappa_, "T0_22 |0> = kappa |0>");
    expect(t0(3, 3), 1.0, "T0_33 |0> = |0>");
    expect(t0(2, 3), 0.0, "T0_23 |0> = 0");
    expect(t0(2, 1), 0.0, "T0_21 |0> = 0");
    expect(t0(3, 1), 0.0, "T0_31 |0> = 0");
    expect(t0(3, 2), 0.0, "T0_32 |0> = 0");
    expect(t(2, 3), beta_, "T_23 |0> = beta |0>");
    expect(t(1, 1), lambda(probe), "T_11 |0> = lambda |0>");
    expect(t(2, 2), kappa_, "T_22 |0> = kappa |0>");
    expect(t(3, 3), 1.0, "T_33 |0> = |0>");
}

// B^g(u) in its two forms.

/// Four-term form with the spectral shift realised as -c:
/// T23 T12(u-c) T23 - T23 T22(u-c) T13 + T13 T11(u-c) T23 - T13 T21(u-c) T13.
inline LinearOperator b_good_direct(const MonodromyBlocks& at_u, const MonodromyBlocks& at_u_minus_c) {
    const auto& t = at_u;
    const auto& s = at_u_minus_c;
    return t(2, 3) * s(1, 2) * t(2, 3) - t(2, 3) * s(2, 2) * t(1, 3) + t(1, 3) * s(1, 1) * t(2, 3) -
           t(1, 3) * s(2, 1) * t(1, 3);
}

/// Compact form T23(u) hatT13(u) - T13(u) hatT12(u).
inline LinearOperator b_good_compact(const MonodromyBlocks& at_u, const MonodromyBlocks& hat_at_u) {
    return at_u(2, 3) * hat_at_u(1, 3) - at_u(1, 3) * hat_at_u(1, 2);
}

inline constexpr double kBGoodConsistencyTol = 1e-11;

/// Returns the compact form after checking it against the four-term form.
inline LinearOperator b_good(const Monodromy& mono, cplx u, double tol = kBGoodConsistencyTol) {
    const cplx c = mono.model().c();
    const MonodromyBlocks& t = mono.at(u);
    const MonodromyBlocks& s = mono.at(u - c);
    const MonodromyBlocks hat = hat_T(t, s);
    LinearOperator compact = b_good_compact(t, hat);
    const LinearOperator direct = b_good_direct(t, s);
    const double res = relative_difference(direct.matrix(), compact.matrix());
    if (!(res <= tol) && compact.norm() > 0.0) {
        std::ostringstream os;
        os << "B^g forms disagree: relative residual " << res;
        throw ConsistencyError(os.str());
    }
    return compact;
}

// Structural residuals.

/// |R(T(u) x I)(I x T(v)) - (I x T(v))(T(u) x I) R| / |R(T(u) x I)(I x T(v))|,
/// evaluated block by block. With R = I + g P the ((a,b),(a',b')) blocks are
///   T_aa'(u) T_bb'(v) + g T_ba'(u) T_ab'(v)   and   T_bb'(v) T_aa'(u) + g T_ba'(v) T_ab'(u).
inline double rtt_residual(const MonodromyBlocks& tu, const MonodromyBlocks& tv, cplx u, cplx v,
                           const Coupling& c) {
    const cplx g = c.g(u, v);
    double num = 0.0;
    double den = 0.0;
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) {
            for (int ap = 1; ap <= 3; ++ap) {
                for (int bp = 1; bp <= 3; ++bp) {
                    const Matrix lhs = tu(a, ap).matrix() * tv(b, bp).matrix() +
                                       g * (tu(b, ap).matrix() * tv(a, bp).matrix());
                    const Matrix rhs = tv(b, bp).matrix() * tu(a, ap).matrix() +
                                       g * (tv(b, ap).matrix() * tu(a, bp).matrix());
                    num += (lhs - rhs).squaredNorm();
                    den += lhs.squaredNorm();
                }
            }
        }
    }
    return std::sqrt(num / den);
}

/// Yang-Baxter residual R12(u,v) R13(u,w) R23(v,w) - R23(v,w) R13(u,w) R12(u,v)
/// on (C^3)^{tensor 3}, relative to the norm of the left side.
inline double ybe_residual(cplx u, cplx v, cplx w, const Coupling& c) {
    const HilbertSpace three(3);
    const Matrix r12 = embed_two_site(r_matrix(u, v, c), 1, 2, three).matrix();
    const Matrix r13 = embed_two_site(r_matrix(u, w, c), 1, 3, three).matrix();
    const Matrix r23 = embed_two_site(r_matrix(v, w, c), 2, 3, three).matrix();
    const Matrix lhs = r12 * r13 * r23;
    const Matrix rhs = r23 * r13 * r12;
    return (lhs - rhs).norm() / lhs.norm();
}

struct QdetResult {
    cplx qdet;
    double residual;
};

/// M = tilde T(u-c) T(u) as a 3 x 3 array of blocks; qdet = tr M / (3 dim);
/// residual |M - qdet I| / |qdet| (Frobenius norm over the whole 3 dim space).
inline QdetResult qdet_check(const Monodromy& mono, cplx u) {
    const cplx c = mono.model().c();
    const MonodromyBlocks tilde = comatrix(mono.at(u - c), mono.at(u - 2.0 * c));
    const MonodromyBlocks& t = mono.at(u);
    const Index d = mono.space().dim();
    std::array<Matrix, 9> m;
    cplx trace{0.0, 0.0};
    for (int i = 1; i <= 3; ++i) {
        for (int k = 1; k <= 3; ++k) {
            Matrix acc = Matrix::Zero(d, d);
            for (int j = 1; j <= 3; ++j) acc += tilde(i, j).matrix() * t(j, k).matrix();
            if (i == k) trace += acc.trace();
            m[static_cast<std::size_t>(3 * (i - 1) + (k - 1))] = std::move(acc);
        }
    }
    const cplx qdet = trace / static_cast<double>(3 * d);
    if (std::abs(qdet) < 1e-300) throw ConsistencyError("quantum determinant vanishes");
    double num = 0.0;
    for (int i = 1; i <= 3; ++i) {
        for (int k = 1; k <= 3; ++k) {
            Matrix diff = m[static_cast<std::size_t>(3 * (i - 1) + (k - 1))];
            if (i == k) diff -= qdet * Matrix::Identity(d, d);
            num += diff.squaredNorm();
        }
    }
    return {qdet, std::sqrt(num) / std::abs(qdet)};
}

/// Largest relative commutator |[A,B]| / |AB|.
inline double commutator_residual(const LinearOperator& a, const LinearOperator& b) {
    const Matrix ab = a.matrix() * b.matrix();
    const double den = ab.norm();
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return (ab - b.matrix() * a.matrix()).norm() / den;
}

} // namespace gl3ba
