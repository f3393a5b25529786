#pragma once

// Enumeration of set partitions into labelled subsets of prescribed sizes.
//
// A partition of an n-element set into k labelled subsets is encoded by its
// assignment vector (label of element 0, label of element 1, ...). Partitions
// are produced in lexicographic order of assignment vectors, which makes every
// partition sum reproducible term by term.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gl3ba/kernel.hpp"

namespace gl3ba {

class Partition {
public:
    Partition(std::vector<int> assignment, std::vector<std::size_t> cardinalities)
        : assignment_(std::move(assignment)), cardinalities_(std::move(cardinalities)) {}

    std::size_t subset_count() const noexcept { return cardinalities_.size(); }
    const std::vector<int>& assignment() const noexcept { return assignment_; }
    const std::vector<std::size_t>& cardinalities() const noexcept { return cardinalities_; }

    /// Indices (into the source) of the elements carrying `label`.
    std::vector<std::size_t> indices(int label) const {
        std::vector<std::size_t> out;
        out.reserve(cardinalities_.at(static_cast<std::size_t>(label)));
        for (std::size_t i = 0; i < assignment_.size(); ++i) {
            if (assignment_[i] == label) out.push_back(i);
        }
        return out;
    }

    /// Elements of `source` carrying `label`, in source order.
    std::vector<cplx> subset(std::span<const cplx> source, int label) const {
        std::vector<cplx> out;
        out.reserve(cardinalities_.at(static_cast<std::size_t>(label)));
        for (std::size_t i = 0; i < assignment_.size(); ++i) {
            if (assignment_[i] == label) out.push_back(source[i]);
        }
        return out;
    }

private:
    std::vector<int> assignment_;
    std::vector<std::size_t> cardinalities_;
};

/// Lazily yields all partitions of an n-element set with the given subset
/// sizes, in lexicographic order of assignment vectors.
class PartitionStream {
public:
    PartitionStream(std::size_t n, std::vector<std::size_t> cardinalities)
        : cards_(std::move(cardinalities)) {
        const std::size_t total = std::accumulate(cards_.begin(), cards_.end(), std::size_t{0});
        if (total != n) {
            throw std::invalid_argument("partition cardinalities do not sum to the set size");
        }
        current_.reserve(n);
        for (std::size_t label = 0; label < cards_.size(); ++label) {
            current_.insert(current_.end(), cards_[label], static_cast<int>(label));
        }
    }

    std::optional<Partition> next() {
        if (done_) return std::nullopt;
        Partition out(current_, cards_);
        done_ = !std::next_permutation(current_.begin(), current_.end());
        return out;
    }

private:
    std::vector<std::size_t> cards_;
    std::vector<int> current_;
    bool done_ = false;
};

inline PartitionStream enumerate_partitions(std::size_t n, std::vector<std::size_t> cardinalities) {
    return PartitionStream(n, std::move(cardinalities));
}

/// Calls `fn(const Partition&)` for every partition; returns the count.
template <class Fn>
std::size_t for_each_partition(std::size_t n, std::vector<std::size_t> cardinalities, Fn&& fn) {
    PartitionStream stream(n, std::move(cardinalities));
    std::size_t count = 0;
    while (auto p = stream.next()) {
        fn(*p);
        ++count;
    }
    return count;
}

/// n! / prod(k_i!)
inline std::size_t multinomial(std::span<const std::size_t> cardinalities) {
    std::size_t result = 1;
    std::size_t seen = 0;
    for (std::size_t k : cardinalities) {
        for (std::size_t i = 1; i <= k; ++i) {
            ++seen;
            result = result * seen / i;
        }
    }
    return result;
}

/// Split of a set into (chosen, rest) by a partition with two labels.
struct Split {
    std::vector<cplx> first;
    std::vector<cplx> second;
};

/// Calls `fn(const Split&)` for each way of choosing `k` elements of `xs`.
template <class Fn>
std::size_t for_each_split(std::span<const cplx> xs, std::size_t k, Fn&& fn) {
    if (k > xs.size()) return 0;
    return for_each_partition(xs.size(), {k, xs.size() - k}, [&](const Partition& p) {
        fn(Split{p.subset(xs, 0), p.subset(xs, 1)});
    });
}

} // namespace gl3ba
