#pragma once

// Bethe vectors as explicit partition sums of creation operators acting on
// the pseudovacuum, and the multiple action of B^g.
//
// Every weight that contains 1/g(v,u) is evaluated in a form that is
// polynomial in the cross differences v_j - u_k (via inv_g and dwpf_over_g),
// so vectors stay finite when some v_j equals u_k or u_k - c.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gl3ba/dwpf.hpp"
#include "gl3ba/hilbert.hpp"
#include "gl3ba/kernel.hpp"
#include "gl3ba/monodromy.hpp"
#include "gl3ba/partitions.hpp"

namespace gl3ba {

/// Bethe parameters u (#u = a) and v (#v = b).
struct BetheParams {
    SpectralSet u;
    SpectralSet v;

    std::size_t a() const noexcept { return u.size(); }
    std::size_t b() const noexcept { return v.size(); }

    /// Throws unless all parameters, inhomogeneities and the +-c shifts of
    /// each are separated by more than eps.
    void validate(const ChainModel& model, double eps) const {
        u.validate_distinct(eps);
        v.validate_distinct(eps);
        const cplx c = model.c();
        const std::vector<cplx> shifts{0.0, c, -c};
        const std::vector<cplx> cross{c, -c};
        check_pole_avoidance(u.span(), v.span(), shifts, eps);
        check_pole_avoidance(u.span(), u.span(), cross, eps);
        check_pole_avoidance(v.span(), v.span(), cross, eps);
        check_pole_avoidance(u.span(), model.inhomogeneities().span(), shifts, eps);
        check_pole_avoidance(v.span(), model.inhomogeneities().span(), shifts, eps);
    }
};

enum class Construction {
    gbv,               ///< double partition sum over T13, T12, T23
    hgbv,              ///< the same sum for the hatted monodromy matrix
    twisted_expansion, ///< three-subset sum with T23 |0> = beta |0> resolved
    partition_b0,      ///< single partition sum for the untwisted chain
    semi_onshell,      ///< three-subset sum valid on the first Bethe family
    multi_action,      ///< B^g(u_a) ... B^g(u_1) |0> by matrix action
    multi_formula,     ///< partition sum for the multiple B^g action
};

inline const char* to_string(Construction c) {
    switch (c) {
    case Construction::gbv: return "gbv";
    case Construction::hgbv: return "hgbv";
    case Construction::twisted_expansion: return "twisted-expansion";
    case Construction::partition_b0: return "partition-b0";
    case Construction::semi_onshell: return "semi-onshell";
    case Construction::multi_action: return "multi-action";
    case Construction::multi_formula: return "multi-formula";
    }
    return "?";
}

struct BetheVectorResult {
    StateVector vector;
    Construction construction;
    std::size_t term_count;
};

/// T_ij(z_1) ... T_ij(z_n) applied to `state`. Entries with equal indices
/// commute, so the order is immaterial; the last factor acts first.
inline StateVector apply_product(const Monodromy& mono, int i, int j, std::span<const cplx> zs,
                                 StateVector state) {
    for (auto it = zs.rbegin(); it != zs.rend(); ++it) state = mono(i, j, *it) * state;
    return state;
}

namespace detail {

inline std::vector<cplx> concat(std::span<const cplx> a, std::span<const cplx> b) {
    std::vector<cplx> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline cplx ipow(cplx x, long n) {
    cplx r{1.0, 0.0};
    const bool inv = n < 0;
    for (long k = 0; k < (inv ? -n : n); ++k) r *= x;
    return inv ? 1.0 / r : r;
}

inline void require_variant(const Monodromy& mono, Variant v, const char* what) {
    if (mono.variant() != v) {
        throw std::invalid_argument(std::string(what) + ": requires the " + to_string(v) +
                                    " monodromy matrix, got " + to_string(mono.variant()));
    }
}

} // namespace detail

/// B_{a,b}(u;v) as the double partition sum over u => {u_I, u_II},
/// v => {v_I, v_II} with #u_I = #v_I = n:
///   K_n(v_I|u_I) f(u_I,u_II) f(v_II,v_I) / (lambda_2(v_II) lambda_2(u) g(v,u))
///     T13(u_I) T12(u_II) T23(v_II) |0>.
/// Built from whichever monodromy matrix `mono` represents; for the hatted
/// one lambda_2 is its own vacuum eigenvalue lambda_1(z) lambda_3(z-c).
inline BetheVectorResult gbv(const Monodromy& mono, std::span<const cplx> u, std::span<const cplx> v) {
    const Coupling& c = mono.coupling();
    auto lam2 = [&](cplx z) { return mono.vacuum_eigenvalue(2, z); };
    const cplx lam2_u = point_product(lam2, u);
    const StateVector vac = vacuum(mono.space());
    const std::size_t a = u.size();
    const std::size_t b = v.size();
    StateVector out(mono.space());
    std::size_t terms = 0;
    for (std::size_t n = 0; n <= std::min(a, b); ++n) {
        for_each_partition(a, {n, a - n}, [&](const Partition& pu) {
            const auto u1 = pu.subset(u, 0);
            const auto u2 = pu.subset(u, 1);
            for_each_partition(b, {n, b - n}, [&](const Partition& pv) {
                const auto v1 = pv.subset(v, 0);
                const auto v2 = pv.subset(v, 1);
                const cplx w = dwpf_over_g(v1, u1, c) * inv_g_prod(c, v1, u2) * inv_g_prod(c, v2, u) *
                               f_prod(c, u1, u2) * f_prod(c, v2, v1) / (point_product(lam2, v2) * lam2_u);
                ++terms;
                if (w == cplx{0.0, 0.0}) return;
                StateVector s = apply_product(mono, 2, 3, v2, vac);
                s = apply_product(mono, 1, 2, u2, std::move(s));
                s = apply_product(mono, 1, 3, u1, std::move(s));
                out += w * s;
            });
        });
    }
    const Construction tag = mono.variant() == Variant::hatted ? Construction::hgbv : Construction::gbv;
    return {std::move(out), tag, terms};
}

inline BetheVectorResult gbv(const Monodromy& mono, const BetheParams& p) { return gbv(mono, p.u.span(), p.v.span()); }

/// Weight of one term of a three-subset sum, given the subsets.
using ThreeSubsetWeight =
    std::function<cplx(std::size_t n, std::size_t s, std::span<const cplx> first,
                       std::span<const cplx> second, std::span<const cplx> third)>;

/// Sum over u => {u_1, u_2, u_3} with #u_1 = s, #u_2 = n - s, 0 <= s <= n <= n_max,
/// of weight * T13(u_1) T13(u_2) T12(u_3) |0>.
inline BetheVectorResult three_subset_sum(const Monodromy& mono, std::span<const cplx> u, std::size_t n_max,
                                          const ThreeSubsetWeight& weight, Construction tag) {
    const StateVector vac = vacuum(mono.space());
    const std::size_t a = u.size();
    StateVector out(mono.space());
    std::size_t terms = 0;
    for (std::size_t n = 0; n <= std::min(a, n_max); ++n) {
        for (std::size_t s = 0; s <= n; ++s) {
            for_each_partition(a, {s, n - s, a - n}, [&](const Partition& p) {
                const auto u1 = p.subset(u, 0);
                const auto u2 = p.subset(u, 1);
                const auto u3 = p.subset(u, 2);
                const cplx w = weight(n, s, u1, u2, u3);
                ++terms;
                if (w == cplx{0.0, 0.0}) return;
                StateVector st = apply_product(mono, 1, 2, u3, vac);
                st = apply_product(mono, 1, 3, u2, std::move(st));
                st = apply_product(mono, 1, 3, u1, std::move(st));
                out += w * st;
            });
        }
    }
    return {std::move(out), tag, terms};
}

/// B_{a,b}(u;v) for the twisted chain with the sum over v resolved through
/// the partition identity: sum over u => {u_1, u_2, u_3} of
///   beta^{b-n} / (kappa^{a+b-n} g(v,u)) (-1)^{n-s} f(u_1,u_2) f(v,u_1)
///     f(u_1,u_3) f(u_2,u_3) T13(u_1) T13(u_2) T12(u_3) |0>.
/// `n_max` truncates the outer sum (terms with n > b vanish identically).
inline BetheVectorResult twisted_expansion(const Monodromy& mono, std::span<const cplx> u,
                                           std::span<const cplx> v, std::size_t n_max) {
    detail::require_variant(mono, Variant::twisted, "twisted_expansion");
    const Coupling& c = mono.coupling();
    const cplx kappa = mono.model().kappa();
    const cplx beta = mono.model().beta();
    const long a = static_cast<long>(u.size());
    const long b = static_cast<long>(v.size());
    auto weight = [&](std::size_t n, std::size_t s, std::span<const cplx> u1, std::span<const cplx> u2,
                      std::span<const cplx> u3) {
        const long nn = static_cast<long>(n);
        const double sign = ((n - s) % 2 == 0) ? 1.0 : -1.0;
        // f(v,u_1) / g(v,u) = h(v,u_1) / g(v, u_2 u u_3)
        const auto rest = detail::concat(u2, u3);
        const cplx fv_over_g = h_prod(c, v, u1) * inv_g_prod(c, v, rest);
        return sign * detail::ipow(beta, b - nn) / detail::ipow(kappa, a + b - nn) * fv_over_g *
               f_prod(c, u1, u2) * f_prod(c, u1, u3) * f_prod(c, u2, u3);
    };
    return three_subset_sum(mono, u, n_max, weight, Construction::twisted_expansion);
}

inline BetheVectorResult twisted_expansion(const Monodromy& mono, std::span<const cplx> u,
                                           std::span<const cplx> v) {
    return twisted_expansion(mono, u, v, u.size());
}

/// B^0_{a,b}(u;v) of the untwisted chain (b <= a): sum over u => {u_I, u_II},
/// #u_I = b, of K_b(v|u_I) f(u_I,u_II) / (kappa^a g(v,u)) T13(u_I) T12(u_II) |0>.
inline BetheVectorResult partition_b0(const Monodromy& mono, std::span<const cplx> u, std::span<const cplx> v) {
    detail::require_variant(mono, Variant::plain, "partition_b0");
    if (v.size() > u.size()) {
        throw std::invalid_argument("partition_b0: the untwisted chain only carries colorings with b <= a");
    }
    const Coupling& c = mono.coupling();
    const cplx kappa_a = detail::ipow(mono.model().kappa(), static_cast<long>(u.size()));
    const StateVector vac = vacuum(mono.space());
    StateVector out(mono.space());
    const std::size_t terms = for_each_split(u, v.size(), [&](const Split& sp) {
        const cplx w = dwpf_over_g(v, sp.first, c) * inv_g_prod(c, v, sp.second) *
                       f_prod(c, sp.first, sp.second) / kappa_a;
        StateVector s = apply_product(mono, 1, 2, sp.second, vac);
        s = apply_product(mono, 1, 3, sp.first, std::move(s));
        out += w * s;
    });
    return {std::move(out), Construction::partition_b0, terms};
}

namespace detail {

/// (-kappa)^{n-s} lambda(u_1) f(u_2,u_1) f(u_3,u_1) f(u_2,u_3)
inline cplx multi_action_core(const Monodromy& mono, std::size_t n, std::size_t s, std::span<const cplx> u1,
                              std::span<const cplx> u2, std::span<const cplx> u3) {
    const Coupling& c = mono.coupling();
    const ChainModel& m = mono.model();
    const cplx lam = point_product([&](cplx z) { return m.lambda(z); }, u1);
    return ipow(-m.kappa(), static_cast<long>(n - s)) * lam * f_prod(c, u2, u1) * f_prod(c, u3, u1) *
           f_prod(c, u2, u3);
}

} // namespace detail

/// Representation of the twisted B_{a,b}(u;v) valid when (u,v) satisfy the
/// first family of Bethe equations:
///   sum beta^{b-n} / (kappa^{a+b} g(v,u)) (-kappa)^{n-s} lambda(u_1)
///     f(u_2,u_1) f(u_3,u_1) f(u_2,u_3) T13(u_1) T13(u_2) T12(u_3) |0>.
inline BetheVectorResult semi_onshell_rep(const Monodromy& mono, std::span<const cplx> u,
                                          std::span<const cplx> v) {
    detail::require_variant(mono, Variant::twisted, "semi_onshell_rep");
    const Coupling& c = mono.coupling();
    const cplx kappa = mono.model().kappa();
    const cplx beta = mono.model().beta();
    const long a = static_cast<long>(u.size());
    const long b = static_cast<long>(v.size());
    const cplx pre = inv_g_prod(c, v, u) / detail::ipow(kappa, a + b);
    auto weight = [&](std::size_t n, std::size_t s, std::span<const cplx> u1, std::span<const cplx> u2,
                      std::span<const cplx> u3) {
        return pre * detail::ipow(beta, b - static_cast<long>(n)) * detail::multi_action_core(mono, n, s, u1, u2, u3);
    };
    return three_subset_sum(mono, u, u.size(), weight, Construction::semi_onshell);
}

/// Partition-sum formula for B^g(u_1) ... B^g(u_a) |0>:
///   sum beta^{2a-n} (-kappa)^{n-s} lambda(u_1) f(u_2,u_1) f(u_3,u_1) f(u_2,u_3)
///     T13(u_1) T13(u_2) T12(u_3) |0>.
inline BetheVectorResult bg_multi_formula(const Monodromy& mono, std::span<const cplx> u) {
    detail::require_variant(mono, Variant::twisted, "bg_multi_formula");
    const cplx beta = mono.model().beta();
    const long a = static_cast<long>(u.size());
    auto weight = [&](std::size_t n, std::size_t s, std::span<const cplx> u1, std::span<const cplx> u2,
                      std::span<const cplx> u3) {
        return detail::ipow(beta, 2 * a - static_cast<long>(n)) * detail::multi_action_core(mono, n, s, u1, u2, u3);
    };
    return three_subset_sum(mono, u, u.size(), weight, Construction::multi_formula);
}

/// B^g(u_a) ... B^g(u_1) |0> by direct matrix action (u_1 acts first). Each
/// B^g is cross-checked between its four-term and compact forms.
inline BetheVectorResult bg_multi_action(const Monodromy& mono, std::span<const cplx> u) {
    StateVector s = vacuum(mono.space());
    for (cplx z : u) s = b_good(mono, z) * s;
    return {std::move(s), Construction::multi_action, u.size()};
}

} // namespace gl3ba
