#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tailtest {

// Ascending, finite, non-negative samples.
class SortedSampleSplit {
public:
    // Sorts a copy of the input. Throws DomainError on negative or
    // non-finite values, and on empty input.
    static SortedSampleSplit from_unsorted(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const { return values_[j]; }

private:
    explicit SortedSampleSplit(std::vector<double> sorted) : values_(std::move(sorted)) {}

    std::vector<double> values_;
};

using FourSplits = std::array<SortedSampleSplit, 4>;

// Deals `values` round-robin (index mod 4) into four splits, then sorts each.
FourSplits split_round_robin(std::span<const double> values);

// A bucket statistic; std::nullopt marks a degenerate bucket pair whose
// length change is <= 0. Degenerate buckets stand for S -> +inf.
using BucketStatistic = std::optional<double>;

/// 1-based rank used for fractional rank q: round(q (n+1)) clamped to
/// [1, n], rounding half away from zero.
std::size_t fractional_rank(double q, std::size_t n);

// Sample at fractional rank q in (0, 1).
double order_statistic_at(const SortedSampleSplit& split, double q);

/// The endpoints consumed by the four-split statistic, one vector per
/// split, indexed by coarse bucket i (entries outside [2, k-2] are unused
/// and left at 0):
///   [0][i] = X((ik+1)/k^2)      [1][i] = X(i/k)
///   [2][i] = X(((i+1)k+1)/k^2)  [3][i] = X((i+1)/k)
struct BucketGrid {
    int k = 0;
    std::array<std::vector<double>, 4> endpoints;
};

BucketGrid extract_bucket_grid(const FourSplits& splits, int k);

// L1 / (k (L2 - L1)) with L1 = [0][i] - [1][i], L2 = [2][i] - [3][i].
BucketStatistic hat_S(const BucketGrid& grid, int i);

/// Order-statistic estimate of S(i/k) from four independent splits, one
/// split per endpoint term. Requires 2 <= i <= k-2 and equal split sizes
/// n >= k^2.
BucketStatistic hat_S(const FourSplits& splits, int i, int k);

/// Single-split, single-granularity estimate of S(i/k). With endpoints
/// I[j] = X(j/k) (I[0] = sample minimum) the length change is centered on
/// the endpoint i/k:
///
///   (I[i+1] - I[i-1]) / (2k (I[i+1] - 2 I[i] + I[i-1]))
///
/// Requires 1 <= i <= k-2 and n >= k.
BucketStatistic hat_S_weak(const SortedSampleSplit& split, int i, int k);

// Rank differences between consecutive fine endpoints j/k^2, j = 0..k^2,
// with rank 0 and rank n closing the ends.
std::vector<std::size_t> fine_bucket_counts(std::size_t n, int k);

}  // namespace tailtest
