#pragma once

// Scalar rational functions of spectral parameters and the set-product
// shorthand built on them.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gl3ba {

using cplx = std::complex<double>;

/// Relative threshold below which |u - v| / |c| is treated as a pole.
inline constexpr double kPoleEpsilon = 1e-13;

/// Default minimum separation (relative to |c|) between spectral parameters.
inline constexpr double kSeparationEpsilon = 1e-6;

class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, cplx left, cplx right)
        : std::domain_error(what), left_(left), right_(right) {}

    cplx left() const noexcept { return left_; }
    cplx right() const noexcept { return right_; }

private:
    cplx left_;
    cplx right_;
};

namespace detail {

inline std::string format_pair(const char* fn, cplx u, cplx v) {
    std::ostringstream os;
    os.precision(17);
    os << fn << ": pole at (" << u << ", " << v << ")";
    return os.str();
}

} // namespace detail

/// The constant c of the R-matrix I + c/(u-v) P.
class Coupling {
public:
    constexpr Coupling() = default;

    explicit Coupling(cplx c) : c_(c) {
        if (c == cplx{0.0, 0.0}) {
            throw std::invalid_argument("coupling constant c must be nonzero");
        }
    }

    cplx value() const noexcept { return c_; }
    double magnitude() const noexcept { return std::abs(c_); }

    /// g(u,v) = c/(u-v)
    cplx g(cplx u, cplx v) const {
        const cplx d = u - v;
        if (std::abs(d) <= kPoleEpsilon * magnitude()) {
            throw PoleError(detail::format_pair("g", u, v), u, v);
        }
        return c_ / d;
    }

    /// 1/g(u,v) = (u-v)/c; regular everywhere.
    cplx inv_g(cplx u, cplx v) const noexcept { return (u - v) / c_; }

    /// f(u,v) = (u-v+c)/(u-v)
    cplx f(cplx u, cplx v) const {
        const cplx d = u - v;
        if (std::abs(d) <= kPoleEpsilon * magnitude()) {
            throw PoleError(detail::format_pair("f", u, v), u, v);
        }
        return (d + c_) / d;
    }

    /// h(u,v) = (u-v+c)/c = f(u,v)/g(u,v)
    cplx h(cplx u, cplx v) const noexcept { return (u - v + c_) / c_; }

    bool operator==(const Coupling&) const = default;

private:
    cplx c_{1.0, 0.0};
};

/// An ordered collection of pairwise-distinct spectral parameters.
///
/// Distinctness is not enforced on construction since intermediate sets built
/// by the action formulas legitimately contain shifted copies; call
/// `validate_distinct` where the invariant is required.
class SpectralSet {
public:
    SpectralSet() = default;
    SpectralSet(std::initializer_list<cplx> xs, std::string label = {})
        : elems_(xs), label_(std::move(label)) {}
    explicit SpectralSet(std::vector<cplx> xs, std::string label = {})
        : elems_(std::move(xs)), label_(std::move(label)) {}

    std::size_t size() const noexcept { return elems_.size(); }
    bool empty() const noexcept { return elems_.empty(); }
    cplx operator[](std::size_t i) const { return elems_[i]; }
    const std::string& label() const noexcept { return label_; }
    const std::vector<cplx>& elements() const noexcept { return elems_; }
    std::span<const cplx> span() const noexcept { return elems_; }
    operator std::span<const cplx>() const noexcept { return elems_; }

    auto begin() const noexcept { return elems_.begin(); }
    auto end() const noexcept { return elems_.end(); }

    /// Every element shifted by `delta` (the set x + delta).
    SpectralSet shifted(cplx delta) const {
        SpectralSet out = *this;
        for (auto& x : out.elems_) x += delta;
        return out;
    }

    /// This set with `x` appended.
    SpectralSet with(cplx x) const {
        SpectralSet out = *this;
        out.elems_.push_back(x);
        return out;
    }

    /// This set with element `i` removed (the complement of x_i).
    SpectralSet without(std::size_t i) const {
        SpectralSet out = *this;
        out.elems_.erase(out.elems_.begin() + static_cast<std::ptrdiff_t>(i));
        return out;
    }

    /// Throws std::invalid_argument if two elements are closer than `eps`.
    void validate_distinct(double eps) const {
        for (std::size_t j = 0; j < elems_.size(); ++j) {
            for (std::size_t k = j + 1; k < elems_.size(); ++k) {
                if (std::abs(elems_[j] - elems_[k]) <= eps) {
                    std::ostringstream os;
                    os << "spectral set '" << label_ << "': elements " << j << " and " << k
                       << " closer than " << eps;
                    throw std::invalid_argument(os.str());
                }
            }
        }
    }

private:
    std::vector<cplx> elems_;
    std::string label_;
};

inline SpectralSet concat(const SpectralSet& a, const SpectralSet& b, std::string label = {}) {
    std::vector<cplx> xs = a.elements();
    xs.insert(xs.end(), b.begin(), b.end());
    return SpectralSet(std::move(xs), std::move(label));
}

// Set products. A function of two arguments applied to sets denotes the
// product over all pairs; a product over an empty set is 1.

template <class Fn>
cplx pair_product(Fn&& fn, std::span<const cplx> left, std::span<const cplx> right) {
    cplx acc{1.0, 0.0};
    for (cplx x : left) {
        for (cplx y : right) acc *= fn(x, y);
    }
    return acc;
}

inline cplx g_prod(const Coupling& c, std::span<const cplx> x, std::span<const cplx> y) {
    return pair_product([&](cplx a, cplx b) { return c.g(a, b); }, x, y);
}
inline cplx g_prod(const Coupling& c, cplx x, std::span<const cplx> y) {
    return g_prod(c, std::span<const cplx>(&x, 1), y);
}
inline cplx g_prod(const Coupling& c, std::span<const cplx> x, cplx y) {
    return g_prod(c, x, std::span<const cplx>(&y, 1));
}

inline cplx inv_g_prod(const Coupling& c, std::span<const cplx> x, std::span<const cplx> y) {
    return pair_product([&](cplx a, cplx b) { return c.inv_g(a, b); }, x, y);
}
inline cplx inv_g_prod(const Coupling& c, cplx x, std::span<const cplx> y) {
    return inv_g_prod(c, std::span<const cplx>(&x, 1), y);
}
inline cplx inv_g_prod(const Coupling& c, std::span<const cplx> x, cplx y) {
    return inv_g_prod(c, x, std::span<const cplx>(&y, 1));
}

inline cplx f_prod(const Coupling& c, std::span<const cplx> x, std::span<const cplx> y) {
    return pair_product([&](cplx a, cplx b) { return c.f(a, b); }, x, y);
}
inline cplx f_prod(const Coupling& c, cplx x, std::span<const cplx> y) {
    return f_prod(c, std::span<const cplx>(&x, 1), y);
}
inline cplx f_prod(const Coupling& c, std::span<const cplx> x, cplx y) {
    return f_prod(c, x, std::span<const cplx>(&y, 1));
}

inline cplx h_prod(const Coupling& c, std::span<const cplx> x, std::span<const cplx> y) {
    return pair_product([&](cplx a, cplx b) { return c.h(a, b); }, x, y);
}
inline cplx h_prod(const Coupling& c, cplx x, std::span<const cplx> y) {
    return h_prod(c, std::span<const cplx>(&x, 1), y);
}
inline cplx h_prod(const Coupling& c, std::span<const cplx> x, cplx y) {
    return h_prod(c, x, std::span<const cplx>(&y, 1));
}

/// Product of a one-variable function over a set, e.g. lambda(u_I).
template <class Fn>
cplx point_product(Fn&& fn, std::span<const cplx> xs) {
    cplx acc{1.0, 0.0};
    for (cplx x : xs) acc *= fn(x);
    return acc;
}

/// Throws PoleError on the first pair (x, y) with x - y within eps of one of
/// the given shifts (e.g. {0, c, -c}).
inline void check_pole_avoidance(std::span<const cplx> x, std::span<const cplx> y,
                                 std::span<const cplx> shifts, double eps) {
    for (cplx a : x) {
        for (cplx b : y) {
            for (cplx s : shifts) {
                if (std::abs(a - b - s) <= eps) {
                    throw PoleError(detail::format_pair("pole avoidance", a, b), a, b);
                }
            }
        }
    }
}

} // namespace gl3ba
