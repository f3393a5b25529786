#pragma once

// Residuals of the Bethe equations and a multistart Newton solver.
//
// Unknowns are complex but Newton runs on their real and imaginary parts,
// with a central finite-difference Jacobian. The step is the minimum-norm
// least-squares solution, so underdetermined systems (the first family with
// b > a unknowns v) are handled by the same code path.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gl3ba/bethe_vectors.hpp"
#include "gl3ba/kernel.hpp"
#include "gl3ba/monodromy.hpp"
#include "gl3ba/sampling.hpp"

namespace gl3ba {

enum class SystemMode {
    full,        ///< both families, unknowns u and v
    constV_only, ///< first family only, u held fixed, unknowns v
    full_special ///< first family then second family; same unknowns as full
};

struct SolverConfig {
    double tol = 1e-12;      ///< on the Euclidean norm of the residual vector
    int max_iter = 100;
    double damping = 1.0;    ///< initial step fraction; halved by the line search
    bool finite_difference = true;
    double fd_step = 1e-7;   ///< relative: h = fd_step (1 + |z|)
    std::uint64_t seed = 0;
    int starts = 64;
    double separation = kSeparationEpsilon;

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("solver tol must be positive");
        if (max_iter < 1) throw std::invalid_argument("solver max_iter must be at least 1");
        if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("solver damping must lie in (0,1]");
        if (!finite_difference) throw std::invalid_argument("solver needs a Jacobian: only finite differences are implemented");
        if (starts < 1) throw std::invalid_argument("solver needs at least one start");
    }
};

struct SolveResult {
    bool converged = false;
    std::vector<cplx> x;          ///< best iterate
    double residual_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int start_index = -1;         ///< which multistart guess produced x
    std::vector<double> history;  ///< residual norm after each iteration, starting from the guess
};

struct BetheSolution {
    std::vector<cplx> u;
    std::vector<cplx> v;
    SolveResult record;

    bool converged() const noexcept { return record.converged; }
};

using ResidualFn = std::function<std::vector<cplx>(std::span<const cplx>)>;

/// Residual norm, or +inf when the point sits on a pole.
inline double safe_norm(const ResidualFn& fn, std::span<const cplx> x) {
    try {
        double s = 0.0;
        for (cplx r : fn(x)) s += std::norm(r);
        return std::isfinite(s) ? std::sqrt(s) : std::numeric_limits<double>::infinity();
    } catch (const PoleError&) {
        return std::numeric_limits<double>::infinity();
    }
}

/// Damped Newton from one starting point.
inline SolveResult newton(const ResidualFn& fn, std::vector<cplx> x, const SolverConfig& cfg) {
    using RMat = Eigen::MatrixXd;
    using RVec = Eigen::VectorXd;
    auto to_real = [](const std::vector<cplx>& r) {
        RVec out(2 * static_cast<Index>(r.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            out(2 * static_cast<Index>(i)) = r[i].real();
            out(2 * static_cast<Index>(i) + 1) = r[i].imag();
        }
        return out;
    };

    SolveResult res;
    double norm = safe_norm(fn, x);
    res.history.push_back(norm);
    res.x = x;
    res.residual_norm = norm;
    if (!std::isfinite(norm)) return res;

    const std::size_t n = x.size();
    for (int it = 0; it < cfg.max_iter && norm > cfg.tol; ++it) {
        res.iterations = it + 1;
        RVec f0;
        RMat jac;
        try {
            f0 = to_real(fn(x));
            jac.resize(f0.size(), 2 * static_cast<Index>(n));
            for (std::size_t k = 0; k < 2 * n; ++k) {
                const std::size_t i = k / 2;
                const double h = cfg.fd_step * (1.0 + std::abs(x[i]));
                const cplx dz = (k % 2 == 0) ? cplx{h, 0.0} : cplx{0.0, h};
                std::vector<cplx> xp = x;
                std::vector<cplx> xm = x;
                xp[i] += dz;
                xm[i] -= dz;
                jac.col(static_cast<Index>(k)) = (to_real(fn(xp)) - to_real(fn(xm))) / (2.0 * h);
            }
        } catch (const PoleError&) {
            break;
        }
        Eigen::CompleteOrthogonalDecomposition<RMat> cod(jac);
        if (cod.rank() == 0) break;
        const RVec step = cod.solve(-f0);
        if (!step.allFinite()) break;

        double t = cfg.damping;
        bool accepted = false;
        while (t > 1e-10) {
            std::vector<cplx> trial = x;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] += t * cplx{step(2 * static_cast<Index>(i)), step(2 * static_cast<Index>(i) + 1)};
            }
            const double tn = safe_norm(fn, trial);
            if (tn < norm) {
                x = std::move(trial);
                norm = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        res.history.push_back(norm);
        if (!accepted) break;
    }
    res.x = x;
    res.residual_norm = norm;
    res.converged = norm <= cfg.tol;
    return res;
}

/// Estimated order of convergence from the last three residual norms of a
/// Newton history; NaN when there are too few usable points.
inline double convergence_order(std::span<const double> history) {
    std::vector<double> h;
    for (double r : history) {
        if (r > 0.0 && std::isfinite(r)) h.push_back(r);
    }
    if (h.size() < 4) return std::numeric_limits<double>::quiet_NaN();
    // The last step is often at the rounding floor; use the three before it.
    const std::size_t k = h.size() - 2;
    const double num = std::log(h[k] / h[k - 1]);
    const double den = std::log(h[k - 1] / h[k - 2]);
    return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
}

namespace detail {

/// First family, component j: lambda(u_j) - kappa f(u_j,u_j-bar)/f(u_j-bar,u_j) f(v,u_j)
inline void first_family(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v,
                         std::vector<cplx>& out) {
    const Coupling& c = m.coupling();
    for (std::size_t j = 0; j < u.size(); ++j) {
        cplx ratio{1.0, 0.0};
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (k != j) ratio *= c.f(u[j], u[k]) / c.f(u[k], u[j]);
        }
        out.push_back(m.lambda(u[j]) - m.kappa() * ratio * f_prod(c, v, u[j]));
    }
}

/// Second family, component k: kappa f(v_k,u) - f(v_k,v_k-bar)/f(v_k-bar,v_k)
inline void second_family(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v,
                          std::vector<cplx>& out) {
    const Coupling& c = m.coupling();
    for (std::size_t k = 0; k < v.size(); ++k) {
        cplx ratio{1.0, 0.0};
        for (std::size_t l = 0; l < v.size(); ++l) {
            if (l != k) ratio *= c.f(v[k], v[l]) / c.f(v[l], v[k]);
        }
        out.push_back(m.kappa() * f_prod(c, v[k], u) - ratio);
    }
}

// The same two families with every denominator multiplied out. With
// p(x,y) = x - y + c and q(x,y) = x - y:
//   first j:  p(u_j,xi) p(u_j-bar,u_j) q(v,u_j) - kappa q(u_j,xi) (-p(u_j,u_j-bar)) p(v,u_j)
//   second k: kappa p(v_k,u) p(v_k-bar,v_k) - q(v_k,u) (-p(v_k,v_k-bar))
// The roots are those of the rational system plus points where a cleared
// factor vanishes, which the admissibility check rejects. Unlike the
// rational form these polynomials grow at infinity, so Newton is not drawn
// towards v -> infinity, where the rational first family levels off.

inline cplx p_prod(cplx c, cplx x, std::span<const cplx> ys) {
    cplx r{1.0, 0.0};
    for (cplx y : ys) r *= x - y + c;
    return r;
}
inline cplx p_prod(cplx c, std::span<const cplx> xs, cplx y) {
    cplx r{1.0, 0.0};
    for (cplx x : xs) r *= x - y + c;
    return r;
}
inline cplx q_prod(cplx x, std::span<const cplx> ys) {
    cplx r{1.0, 0.0};
    for (cplx y : ys) r *= x - y;
    return r;
}
inline cplx q_prod(std::span<const cplx> xs, cplx y) {
    cplx r{1.0, 0.0};
    for (cplx x : xs) r *= x - y;
    return r;
}

inline std::vector<cplx> others(std::span<const cplx> xs, std::size_t i) {
    std::vector<cplx> out;
    out.reserve(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k != i) out.push_back(xs[k]);
    }
    return out;
}

inline void first_family_cleared(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v,
                                 std::vector<cplx>& out) {
    const cplx c = m.c();
    const auto xi = m.inhomogeneities().span();
    for (std::size_t j = 0; j < u.size(); ++j) {
        const auto rest = others(u, j);
        const double sign = (rest.size() % 2 == 0) ? 1.0 : -1.0;
        out.push_back(p_prod(c, u[j], xi) * p_prod(c, rest, u[j]) * q_prod(v, u[j]) -
                      m.kappa() * sign * q_prod(u[j], xi) * p_prod(c, u[j], rest) * p_prod(c, v, u[j]));
    }
}

inline void second_family_cleared(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v,
                                  std::vector<cplx>& out) {
    const cplx c = m.c();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto rest = others(v, k);
        const double sign = (rest.size() % 2 == 0) ? 1.0 : -1.0;
        out.push_back(m.kappa() * p_prod(c, v[k], u) * p_prod(c, rest, v[k]) -
                      sign * q_prod(v[k], u) * p_prod(c, v[k], rest));
    }
}

inline bool sort_key_less(cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
}

inline std::vector<cplx> sorted(std::span<const cplx> xs) {
    std::vector<cplx> out(xs.begin(), xs.end());
    std::sort(out.begin(), out.end(), sort_key_less);
    return out;
}

inline bool same_set(std::span<const cplx> x, std::span<const cplx> y, double eps) {
    if (x.size() != y.size()) return false;
    const auto a = sorted(x);
    const auto b = sorted(y);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > eps) return false;
    }
    return true;
}

inline cplx xi_centroid(const ChainModel& m) {
    cplx s{0.0, 0.0};
    for (cplx x : m.inhomogeneities()) s += x;
    return s / static_cast<double>(m.inhomogeneities().size());
}

/// Multistart guesses: even indices near randomly chosen inhomogeneities,
/// odd indices uniform in a disc around their centroid.
inline std::vector<cplx> start_guess(const ChainModel& m, Rng& rng, std::size_t n, int index) {
    const double scale = m.coupling().magnitude();
    const auto xi = m.inhomogeneities().span();
    std::vector<cplx> x(n);
    for (auto& z : x) {
        if (index % 2 == 0) {
            const std::size_t k = static_cast<std::size_t>(rng.next() % xi.size());
            z = xi[k] + rng.disc(scale);
        } else {
            z = xi_centroid(m) + rng.disc(kAnnulusOuter * scale);
        }
    }
    return x;
}

} // namespace detail

/// Residual vector of the full system: a components of the first family
/// followed by b components of the second. Zero iff on-shell.
inline std::vector<cplx> residual_full(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v) {
    std::vector<cplx> out;
    out.reserve(u.size() + v.size());
    detail::first_family(m, u, v, out);
    detail::second_family(m, u, v, out);
    return out;
}

/// Residual of the first family only (the constraint relating v to a fixed u).
inline std::vector<cplx> residual_constV(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v) {
    std::vector<cplx> out;
    out.reserve(u.size());
    detail::first_family(m, u, v, out);
    return out;
}

/// residual_full with denominators cleared (see first_family_cleared).
inline std::vector<cplx> residual_full_cleared(const ChainModel& m, std::span<const cplx> u,
                                               std::span<const cplx> v) {
    std::vector<cplx> out;
    out.reserve(u.size() + v.size());
    detail::first_family_cleared(m, u, v, out);
    detail::second_family_cleared(m, u, v, out);
    return out;
}

inline std::vector<cplx> residual_constV_cleared(const ChainModel& m, std::span<const cplx> u,
                                                 std::span<const cplx> v) {
    std::vector<cplx> out;
    out.reserve(u.size());
    detail::first_family_cleared(m, u, v, out);
    return out;
}

inline double norm_of(std::span<const cplx> r) {
    double s = 0.0;
    for (cplx x : r) s += std::norm(x);
    return std::sqrt(s);
}

/// True if (u, v) is admissible: distinct within each set and away from
/// the poles of the Bethe-vector formulas.
inline bool admissible_solution(const ChainModel& m, std::span<const cplx> u, std::span<const cplx> v, double eps) {
    try {
        BetheParams{SpectralSet(std::vector<cplx>(u.begin(), u.end())),
                    SpectralSet(std::vector<cplx>(v.begin(), v.end()))}.validate(m, eps);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

namespace detail {

/// Newton on the rational system from x0; if that fails, Newton on the
/// cleared system from the same point, polished on the rational one. The
/// result is judged by the rational residual only.
inline SolveResult newton_with_fallback(const ResidualFn& rational, const ResidualFn& cleared,
                                        const std::vector<cplx>& x0, const SolverConfig& cfg) {
    SolveResult r = newton(rational, x0, cfg);
    if (r.converged) return r;
    const SolveResult poly = newton(cleared, x0, cfg);
    if (!poly.converged) return r;
    SolveResult polished = newton(rational, poly.x, cfg);
    if (!polished.converged) return r;
    polished.iterations += poly.iterations;
    polished.history.insert(polished.history.begin(), poly.history.begin(), poly.history.end());
    return polished;
}

} // namespace detail

/// Solves the first family for #v = b with u fixed. Sets in `avoid` (and
/// any set equal to them up to permutation) are rejected, which lets callers
/// ask for a second, distinct solution.
inline BetheSolution solve_constV_for_v(const ChainModel& m, std::span<const cplx> u, std::size_t b,
                                        const SolverConfig& cfg,
                                        std::span<const std::vector<cplx>> avoid = {}) {
    cfg.validate();
    if (b == 0) throw std::invalid_argument("solve_constV_for_v: b must be positive");
    const std::vector<cplx> uu(u.begin(), u.end());
    const ResidualFn fn = [&](std::span<const cplx> v) { return residual_constV(m, uu, v); };
    const ResidualFn poly = [&](std::span<const cplx> v) { return residual_constV_cleared(m, uu, v); };
    Rng rng(cfg.seed);
    BetheSolution best{uu, {}, {}};
    const double distinct = std::max(1e3 * cfg.separation, 1e-4 * m.coupling().magnitude());
    for (int s = 0; s < cfg.starts; ++s) {
        SolveResult r = detail::newton_with_fallback(fn, poly, detail::start_guess(m, rng, b, s), cfg);
        r.start_index = s;
        if (r.converged) {
            auto v = detail::sorted(r.x);
            const bool repeated = std::any_of(avoid.begin(), avoid.end(),
                                              [&](const std::vector<cplx>& w) { return detail::same_set(v, w, distinct); });
            if (!repeated && admissible_solution(m, uu, v, cfg.separation)) {
                r.x = v;
                return {uu, std::move(v), std::move(r)};
            }
            continue;
        }
        if (r.residual_norm < best.record.residual_norm) best = {uu, detail::sorted(r.x), std::move(r)};
    }
    best.record.converged = false;
    return best;
}

/// Solves both families for #u = a, #v = b. In full_special mode each
/// start first relaxes the first family in v alone, then solves the full
/// system from there.
inline BetheSolution solve_full(const ChainModel& m, std::size_t a, std::size_t b, const SolverConfig& cfg,
                                SystemMode mode = SystemMode::full) {
    cfg.validate();
    if (mode == SystemMode::constV_only) throw std::invalid_argument("solve_full: use solve_constV_for_v");
    if (a + b == 0) throw std::invalid_argument("solve_full: nothing to solve");
    const ResidualFn fn = [&](std::span<const cplx> x) {
        return residual_full(m, x.subspan(0, a), x.subspan(a, b));
    };
    const ResidualFn poly = [&](std::span<const cplx> x) {
        return residual_full_cleared(m, x.subspan(0, a), x.subspan(a, b));
    };
    Rng rng(cfg.seed);
    BetheSolution best;
    for (int s = 0; s < cfg.starts; ++s) {
        std::vector<cplx> x0 = detail::start_guess(m, rng, a + b, s);
        if (mode == SystemMode::full_special && a > 0 && b > 0) {
            const std::vector<cplx> u0(x0.begin(), x0.begin() + static_cast<std::ptrdiff_t>(a));
            const ResidualFn first = [&](std::span<const cplx> v) { return residual_constV(m, u0, v); };
            SolverConfig loose = cfg;
            loose.max_iter = std::min(cfg.max_iter, 20);
            const SolveResult pre = newton(first, {x0.begin() + static_cast<std::ptrdiff_t>(a), x0.end()}, loose);
            std::copy(pre.x.begin(), pre.x.end(), x0.begin() + static_cast<std::ptrdiff_t>(a));
        }
        SolveResult r = detail::newton_with_fallback(fn, poly, x0, cfg);
        r.start_index = s;
        auto u = detail::sorted(std::span<const cplx>(r.x).subspan(0, a));
        auto v = detail::sorted(std::span<const cplx>(r.x).subspan(a, b));
        if (r.converged) {
            if (admissible_solution(m, u, v, cfg.separation)) {
                r.x = u;
                r.x.insert(r.x.end(), v.begin(), v.end());
                return {std::move(u), std::move(v), std::move(r)};
            }
            continue;
        }
        if (r.residual_norm < best.record.residual_norm) best = {std::move(u), std::move(v), std::move(r)};
    }
    best.record.converged = false;
    return best;
}

/// det_a[delta_jk + alpha lambda(u_j) f(u_j-bar,u_j) / h(u_k,u_j)]
///   - (1+alpha)^b (1+alpha kappa)^{a-b}, relative to max(1, |rhs|).
inline double be_det_residual(const ChainModel& m, std::span<const cplx> u, std::size_t b, cplx alpha) {
    const Coupling& c = m.coupling();
    const auto a = static_cast<Index>(u.size());
    Matrix mat = Matrix::Identity(a, a);
    for (Index j = 0; j < a; ++j) {
        cplx fj{1.0, 0.0};
        for (Index k = 0; k < a; ++k) {
            if (k != j) fj *= c.f(u[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(j)]);
        }
        const cplx wj = alpha * m.lambda(u[static_cast<std::size_t>(j)]) * fj;
        for (Index k = 0; k < a; ++k) {
            mat(j, k) += wj / c.h(u[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(j)]);
        }
    }
    const cplx lhs = a == 0 ? cplx{1.0, 0.0} : mat.determinant();
    const cplx rhs = std::pow(1.0 + alpha, static_cast<double>(b)) *
                     std::pow(1.0 + alpha * m.kappa(), static_cast<double>(a) - static_cast<double>(b));
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

/// Maximum determinant residual over the sampled alpha.
inline double be_det_check(const ChainModel& m, std::span<const cplx> u, std::size_t b, std::span<const cplx> alphas) {
    double worst = 0.0;
    for (cplx al : alphas) worst = std::max(worst, be_det_residual(m, u, b, al));
    return worst;
}

} // namespace gl3ba
