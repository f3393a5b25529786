#pragma once

// Seeded random draws of spectral parameters.
//
// The uniform variate is built from the raw 64-bit engine output rather than
// std::uniform_real_distribution, whose algorithm is implementation-defined;
// this keeps draws identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gl3ba/kernel.hpp"

namespace gl3ba {

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed of the stream called `name`, derived from the master seed so that
/// adding or removing a stream leaves the others unchanged.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t z = master ^ fnv1a(name);
    // splitmix64 finaliser
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform (by area) on the annulus rmin <= |z| <= rmax.
    cplx annulus(double rmin, double rmax) {
        const double r = std::sqrt(uniform(rmin * rmin, rmax * rmax));
        const double phi = uniform(0.0, 2.0 * std::numbers::pi);
        return std::polar(r, phi);
    }

    /// Uniform in the disc |z| <= r.
    cplx disc(double r) { return annulus(0.0, r); }

private:
    std::mt19937_64 eng_;
};

inline constexpr double kAnnulusInner = 0.5;
inline constexpr double kAnnulusOuter = 2.5;

/// Draws points of the annulus 0.5|c| <= |z| <= 2.5|c| that keep a minimum
/// distance from every previously accepted point and its shifts by
/// 0, +-c and +-2c. The shifts up to 2c cover the arguments u - c and u - 2c
/// at which the comatrix is evaluated.
class PointSampler {
public:
    PointSampler(Rng& rng, const Coupling& c, double margin)
        : rng_(&rng), c_(c), margin_(margin) {}

    void reserve_point(cplx x) { taken_.push_back(x); }
    void reserve(std::span<const cplx> xs) { taken_.insert(taken_.end(), xs.begin(), xs.end()); }

    bool admissible(cplx z) const {
        const cplx c = c_.value();
        for (cplx t : taken_) {
            for (int k = -2; k <= 2; ++k) {
                if (std::abs(z - t - static_cast<double>(k) * c) < margin_) return false;
            }
        }
        return true;
    }

    cplx point() {
        const double scale = c_.magnitude();
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const cplx z = rng_->annulus(kAnnulusInner * scale, kAnnulusOuter * scale);
            if (admissible(z)) {
                taken_.push_back(z);
                return z;
            }
        }
        throw std::runtime_error("point sampler: could not place a separated point");
    }

    std::vector<cplx> points(std::size_t n) {
        std::vector<cplx> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(point());
        return out;
    }

private:
    Rng* rng_;
    Coupling c_;
    double margin_;
    std::vector<cplx> taken_;
};

/// Default sampling margin relative to |c|. Much wider than the hard
/// separation floor so that products of g and f stay well conditioned.
inline constexpr double kSamplingMargin = 0.1;

} // namespace gl3ba
