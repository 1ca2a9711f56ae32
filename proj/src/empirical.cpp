#include "tailtest/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailtest/error.hpp"

namespace tailtest {

namespace {

void require_bucket(int i, int lo, int hi, int k) {
    if (k < 4) throw DomainError("k must be >= 4");
    if (i < lo || i > hi) {
        std::ostringstream msg;
        msg << "bucket index " << i << " outside [" << lo << ", " << hi << "] for k=" << k;
        throw DomainError(msg.str());
    }
}

BucketStatistic ratio(double numer, double denom) {
    if (!(denom > 0.0)) return std::nullopt;
    return numer / denom;
}

}  // namespace

SortedSampleSplit SortedSampleSplit::from_unsorted(std::vector<double> values) {
    if (values.empty()) throw DomainError("sample split must not be empty");
    for (const double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            std::ostringstream msg;
            msg << "sample value " << v << " outside [0, inf)";
            throw DomainError(msg.str());
        }
    }
    std::sort(values.begin(), values.end());
    return SortedSampleSplit(std::move(values));
}

FourSplits split_round_robin(std::span<const double> values) {
    if (values.size() < 4) throw DomainError("four-way split needs at least 4 samples");
    std::array<std::vector<double>, 4> parts;
    for (auto& p : parts) p.reserve(values.size() / 4 + 1);
    for (std::size_t j = 0; j < values.size(); ++j) parts[j % 4].push_back(values[j]);
    return {SortedSampleSplit::from_unsorted(std::move(parts[0])),
            SortedSampleSplit::from_unsorted(std::move(parts[1])),
            SortedSampleSplit::from_unsorted(std::move(parts[2])),
            SortedSampleSplit::from_unsorted(std::move(parts[3]))};
}

std::size_t fractional_rank(double q, std::size_t n) {
    const double r = std::round(q * (static_cast<double>(n) + 1.0));
    if (r < 1.0) return 1;
    if (r > static_cast<double>(n)) return n;
    return static_cast<std::size_t>(r);
}

double order_statistic_at(const SortedSampleSplit& split, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream msg;
        msg << "fractional rank must lie in (0, 1), got " << q;
        throw DomainError(msg.str());
    }
    return split[fractional_rank(q, split.size()) - 1];
}

BucketGrid extract_bucket_grid(const FourSplits& splits, int k) {
    if (k < 4) throw DomainError("k must be >= 4");
    const std::size_t n = splits[0].size();
    for (const auto& s : splits) {
        if (s.size() != n) throw DomainError("all four splits must have the same size");
    }
    const auto kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
    if (n < kk) {
        std::ostringstream msg;
        msg << "each split needs n >= k^2 = " << kk << " samples, got " << n;
        throw DomainError(msg.str());
    }

    BucketGrid grid;
    grid.k = k;
    for (auto& e : grid.endpoints) e.assign(static_cast<std::size_t>(k), 0.0);
    const double kd = k;
    for (int i = 2; i <= k - 2; ++i) {
        const auto at = static_cast<std::size_t>(i);
        grid.endpoints[0][at] = order_statistic_at(splits[0], (i * kd + 1.0) / (kd * kd));
        grid.endpoints[1][at] = order_statistic_at(splits[1], i / kd);
        grid.endpoints[2][at] = order_statistic_at(splits[2], ((i + 1) * kd + 1.0) / (kd * kd));
        grid.endpoints[3][at] = order_statistic_at(splits[3], (i + 1) / kd);
    }
    return grid;
}

BucketStatistic hat_S(const BucketGrid& grid, int i) {
    require_bucket(i, 2, grid.k - 2, grid.k);
    const auto at = static_cast<std::size_t>(i);
    const double l1 = grid.endpoints[0][at] - grid.endpoints[1][at];
    const double l2 = grid.endpoints[2][at] - grid.endpoints[3][at];
    return ratio(l1, grid.k * (l2 - l1));
}

BucketStatistic hat_S(const FourSplits& splits, int i, int k) {
    require_bucket(i, 2, k - 2, k);
    return hat_S(extract_bucket_grid(splits, k), i);
}

BucketStatistic hat_S_weak(const SortedSampleSplit& split, int i, int k) {
    require_bucket(i, 1, k - 2, k);
    if (split.size() < static_cast<std::size_t>(k)) {
        std::ostringstream msg;
        msg << "weak statistic needs n >= k = " << k << " samples, got " << split.size();
        throw DomainError(msg.str());
    }
    const double kd = k;
    auto endpoint = [&](int j) { return j == 0 ? split[0] : order_statistic_at(split, j / kd); };
    const double prev = endpoint(i - 1);
    const double mid = endpoint(i);
    const double next = endpoint(i + 1);
    // Differences of differences keep the result exactly shift-free.
    const double left = mid - prev;
    const double right = next - mid;
    return ratio(left + right, 2.0 * kd * (right - left));
}

std::vector<std::size_t> fine_bucket_counts(std::size_t n, int k) {
    if (k < 1) throw DomainError("k must be >= 1");
    const auto kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
    std::vector<std::size_t> counts;
    counts.reserve(kk);
    std::size_t prev = 0;
    for (std::size_t j = 1; j < kk; ++j) {
        const std::size_t rank = fractional_rank(static_cast<double>(j) / static_cast<double>(kk), n);
        counts.push_back(rank - prev);
        prev = rank;
    }
    counts.push_back(n - prev);
    return counts;
}

}  // namespace tailtest
