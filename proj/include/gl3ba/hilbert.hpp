#pragma once

// Dense linear algebra on the chain space (C^3)^{tensor L}.
//
// Basis ordering: site 1 is the slowest-varying tensor index, i.e. the basis
// state |s_1 s_2 ... s_L> (s_k in {0,1,2}) has index sum_k s_k 3^{L-k}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gl3ba/kernel.hpp"

namespace gl3ba {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr int kLocalDim = 3;
inline constexpr int kDefaultMaxSites = 6;

class HilbertSpace {
public:
    explicit HilbertSpace(int sites, int max_sites = kDefaultMaxSites) : sites_(sites) {
        if (sites < 1) throw std::invalid_argument("chain length must be at least 1");
        if (sites > max_sites) {
            throw std::invalid_argument("chain length " + std::to_string(sites) +
                                        " exceeds the supported maximum " +
                                        std::to_string(max_sites));
        }
        dim_ = 1;
        for (int i = 0; i < sites; ++i) dim_ *= kLocalDim;
    }

    int sites() const noexcept { return sites_; }
    Index dim() const noexcept { return dim_; }

    /// Stride of site k (1-based) in the basis index.
    Index stride(int site) const noexcept {
        Index s = 1;
        for (int i = site; i < sites_; ++i) s *= kLocalDim;
        return s;
    }

    /// Local state (0..2) of site k (1-based) in basis state `index`.
    int digit(Index index, int site) const noexcept {
        return static_cast<int>((index / stride(site)) % kLocalDim);
    }

    bool operator==(const HilbertSpace&) const = default;

private:
    int sites_;
    Index dim_;
};

class StateVector {
public:
    explicit StateVector(const HilbertSpace& space) : space_(space), amp_(Vector::Zero(space.dim())) {}
    StateVector(const HilbertSpace& space, Vector amp) : space_(space), amp_(std::move(amp)) {
        if (amp_.size() != space_.dim()) throw std::invalid_argument("state dimension mismatch");
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Vector& amplitudes() const noexcept { return amp_; }
    Vector& amplitudes() noexcept { return amp_; }
    double norm() const { return amp_.norm(); }

    StateVector& operator+=(const StateVector& o) { amp_ += o.amp_; return *this; }
    StateVector& operator-=(const StateVector& o) { amp_ -= o.amp_; return *this; }
    StateVector& operator*=(cplx s) { amp_ *= s; return *this; }

    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(cplx s, StateVector a) { return a *= s; }
    friend StateVector operator*(StateVector a, cplx s) { return a *= s; }

private:
    HilbertSpace space_;
    Vector amp_;
};

class LinearOperator {
public:
    explicit LinearOperator(const HilbertSpace& space)
        : space_(space), mat_(Matrix::Zero(space.dim(), space.dim())) {}
    LinearOperator(const HilbertSpace& space, Matrix mat) : space_(space), mat_(std::move(mat)) {
        if (mat_.rows() != space_.dim() || mat_.cols() != space_.dim()) {
            throw std::invalid_argument("operator dimension mismatch");
        }
    }

    static LinearOperator identity(const HilbertSpace& space) {
        return LinearOperator(space, Matrix::Identity(space.dim(), space.dim()));
    }

    const HilbertSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return mat_; }
    Matrix& matrix() noexcept { return mat_; }
    double norm() const { return mat_.norm(); }

    LinearOperator& operator+=(const LinearOperator& o) { mat_ += o.mat_; return *this; }
    LinearOperator& operator-=(const LinearOperator& o) { mat_ -= o.mat_; return *this; }
    LinearOperator& operator*=(cplx s) { mat_ *= s; return *this; }

    friend LinearOperator operator+(LinearOperator a, const LinearOperator& b) { return a += b; }
    friend LinearOperator operator-(LinearOperator a, const LinearOperator& b) { return a -= b; }
    friend LinearOperator operator*(cplx s, LinearOperator a) { return a *= s; }
    friend LinearOperator operator*(LinearOperator a, cplx s) { return a *= s; }

    friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
        return LinearOperator(a.space_, a.mat_ * b.mat_);
    }
    friend StateVector operator*(const LinearOperator& a, const StateVector& v) {
        return StateVector(a.space_, a.mat_ * v.amplitudes());
    }

private:
    HilbertSpace space_;
    Matrix mat_;
};

inline LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) {
    return LinearOperator(a.space(), a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

/// e_1 (x) ... (x) e_1: the all-zeros basis state.
inline StateVector vacuum(const HilbertSpace& space) {
    StateVector v(space);
    v.amplitudes()(0) = 1.0;
    return v;
}

/// Permutation P on C^3 (x) C^3 with the first factor slowest.
inline Matrix permutation9() {
    Matrix p = Matrix::Zero(9, 9);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) p(3 * b + a, 3 * a + b) = 1.0;
    }
    return p;
}

/// Embeds a 3x3 matrix acting on `site` (1-based).
inline LinearOperator embed_one_site(const Matrix& op3, int site, const HilbertSpace& space) {
    if (op3.rows() != 3 || op3.cols() != 3) throw std::invalid_argument("embed: expected 3x3");
    if (site < 1 || site > space.sites()) throw std::out_of_range("embed: site index out of range");
    LinearOperator out(space);
    const Index stride = space.stride(site);
    for (Index col = 0; col < space.dim(); ++col) {
        const int s = space.digit(col, site);
        const Index base = col - s * stride;
        for (int r = 0; r < 3; ++r) {
            const cplx v = op3(r, s);
            if (v != cplx{0.0, 0.0}) out.matrix()(base + r * stride, col) = v;
        }
    }
    return out;
}

/// Embeds a 9x9 matrix acting on C^3_{site_a} (x) C^3_{site_b}, the site_a
/// factor being the slower index of `op9`.
inline LinearOperator embed_two_site(const Matrix& op9, int site_a, int site_b,
                                     const HilbertSpace& space) {
    if (op9.rows() != 9 || op9.cols() != 9) throw std::invalid_argument("embed: expected 9x9");
    if (site_a < 1 || site_a > space.sites() || site_b < 1 || site_b > space.sites()) {
        throw std::out_of_range("embed: site index out of range");
    }
    if (site_a == site_b) throw std::invalid_argument("embed: sites must be distinct");
    LinearOperator out(space);
    const Index sa = space.stride(site_a);
    const Index sb = space.stride(site_b);
    for (Index col = 0; col < space.dim(); ++col) {
        const int da = space.digit(col, site_a);
        const int db = space.digit(col, site_b);
        const Index base = col - da * sa - db * sb;
        const int in = 3 * da + db;
        for (int ra = 0; ra < 3; ++ra) {
            for (int rb = 0; rb < 3; ++rb) {
                const cplx v = op9(3 * ra + rb, in);
                if (v != cplx{0.0, 0.0}) out.matrix()(base + ra * sa + rb * sb, col) = v;
            }
        }
    }
    return out;
}

/// Left-multiplies `m` by the matrix unit E_{row,col} acting on `site`:
/// returns E^{(site)}_{row,col} * m without forming the embedded operator.
inline Matrix apply_site_unit(const Matrix& m, int row, int col, int site, const HilbertSpace& space) {
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    const Index stride = space.stride(site);
    for (Index i = 0; i < space.dim(); ++i) {
        if (space.digit(i, site) != row) continue;
        out.row(i) = m.row(i + (col - row) * stride);
    }
    return out;
}

/// Site-summed Cartan generator sum_k E_{jj}^{(k)}, j in {1,2,3}.
inline LinearOperator weight_operator(int j, const HilbertSpace& space) {
    LinearOperator out(space);
    for (Index i = 0; i < space.dim(); ++i) {
        int count = 0;
        for (int k = 1; k <= space.sites(); ++k) count += (space.digit(i, k) == j - 1) ? 1 : 0;
        out.matrix()(i, i) = static_cast<double>(count);
    }
    return out;
}

/// Site-summed matrix unit sum_k E_{row,col}^{(k)} (global gl3 generator).
inline LinearOperator global_unit(int row, int col, const HilbertSpace& space) {
    Matrix e = Matrix::Zero(3, 3);
    e(row - 1, col - 1) = 1.0;
    LinearOperator out(space);
    for (int k = 1; k <= space.sites(); ++k) out += embed_one_site(e, k, space);
    return out;
}

/// Basis indices of the weight sector with a excitations of the first level
/// and b of the second: L - a sites of color 1, a - b of color 2, b of color 3.
inline std::vector<Index> sector_indices(const HilbertSpace& space, int a, int b) {
    std::vector<Index> out;
    const int n1 = space.sites() - a;
    const int n3 = b;
    if (n1 < 0 || a - b < 0 || b < 0) return out;
    for (Index i = 0; i < space.dim(); ++i) {
        int c1 = 0;
        int c3 = 0;
        for (int k = 1; k <= space.sites(); ++k) {
            c1 += space.digit(i, k) == 0 ? 1 : 0;
            c3 += space.digit(i, k) == 2 ? 1 : 0;
        }
        if (c1 == n1 && c3 == n3) out.push_back(i);
    }
    return out;
}

struct Proportionality {
    cplx ratio;
    double residual;
};

/// ratio = <y,x>/<y,y>; residual = |x - ratio y| / max(|x|, |y|).
inline Proportionality proportionality(const StateVector& x, const StateVector& y) {
    const double yy = y.amplitudes().squaredNorm();
    if (yy == 0.0) throw std::invalid_argument("proportionality: reference vector is zero");
    const cplx ratio = y.amplitudes().dot(x.amplitudes()) / yy;
    const double denom = std::max(x.norm(), y.norm());
    const double res = (x.amplitudes() - ratio * y.amplitudes()).norm() / denom;
    return {ratio, res};
}

/// |x - y| / max(|x|, |y|); +inf if both vanish, so that comparisons of two
/// zero vectors never pass silently.
inline double relative_difference(const Vector& x, const Vector& y) {
    const double denom = std::max(x.norm(), y.norm());
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return (x - y).norm() / denom;
}

inline double relative_difference(const StateVector& x, const StateVector& y) {
    return relative_difference(x.amplitudes(), y.amplitudes());
}

/// |x - y| / max(|x|, |y|, scale). `scale` is the natural magnitude of the
/// computation (e.g. |A| |v| for x = A v), so an identity whose two sides
/// vanish because the target weight sector is empty reads as 0 rather than
/// 0/0. Still +inf if every quantity is zero.
inline double scaled_difference(const StateVector& x, const StateVector& y, double scale) {
    const double denom = std::max({x.norm(), y.norm(), scale});
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return (x.amplitudes() - y.amplitudes()).norm() / denom;
}

inline double relative_difference(const Matrix& x, const Matrix& y) {
    const double denom = std::max(x.norm(), y.norm());
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return (x - y).norm() / denom;
}

} // namespace gl3ba
