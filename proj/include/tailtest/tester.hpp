#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tailtest/distributions.hpp"
#include "tailtest/empirical.hpp"
#include "tailtest/proxy.hpp"

namespace tailtest {

enum class Variant {
    full,  // four splits, two bucket granularities
    weak,  // one split, one granularity, scanned over [c1 k, c2 k]
};

enum class Verdict { heavy, light };

const char* to_string(Verdict v) noexcept;

// Which form of the sample-count bound to evaluate. `statement` is
// k^3 ln k B1^{3/2} beta^2 / alpha; `proof` is k^3 ln k beta^3 B2^{3/2} / alpha.
enum class SampleComplexityForm { statement, proof };

struct TestConfig {
    TailParams tail{0.25, 0.5};
    WellBehavedBounds bounds{1.0, 1.0, 1.0, 0.125};
    int k = 16;
    Variant variant = Variant::full;
    double c1 = 0.1;
    double c2 = 0.8;
    double c_k = 1.0;
    double c_n = 1.0;
    GapConvention gap_convention = GapConvention::beta_cubed_b1;

    // Throws DomainError if any invariant (k >= 4, k >= 4/rho,
    // zeta <= 1/(2k), 0 < c1 < c2 < 1, ...) is violated.
    void validate() const;

    // Inclusive bucket range the variant scans.
    int first_bucket() const;
    int last_bucket() const;
};

struct BucketRecord {
    int i;
    BucketStatistic s_hat;
    double boundary;

    // s_hat - boundary; empty for degenerate buckets.
    std::optional<double> margin() const {
        if (!s_hat) return std::nullopt;
        return *s_hat - boundary;
    }
};

struct TestOutcome {
    Verdict verdict = Verdict::light;
    std::vector<BucketRecord> records;
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;
    TestConfig config;
};

// k = ceil(max(c_k B2 beta^4 (2 B1 + B2) / alpha, 4 / rho)), at least 4.
int required_buckets(const TailParams& tail, const WellBehavedBounds& bounds, double c_k = 1.0);

// n = ceil(c_n k^3 ln k B1^{3/2} beta^2 / alpha) per split, at least k^2.
std::size_t required_samples(int k, const TailParams& tail, const WellBehavedBounds& bounds,
                             double c_n = 1.0,
                             SampleComplexityForm form = SampleComplexityForm::statement);

// 1 - i/k - gap(i/k)/2.
double decision_boundary(const TestConfig& config, int i);

/// Heavy iff some bucket i in [2, k-2] has a finite s_hat below its
/// boundary. Degenerate buckets never count as heavy evidence.
TestOutcome run_full_test(const FourSplits& splits, const TestConfig& config);

// Same decision rule on the single-split statistic over [ceil(c1 k), floor(c2 k)].
TestOutcome run_weak_test(const SortedSampleSplit& split, const TestConfig& config);

// Draws from `model` with `seed` and dispatches on config.variant. The full
// variant draws 4n samples in one stream and deals them round-robin, which
// is exactly what loading the same stream from a file with a four-way split
// produces.
TestOutcome run_test_on_model(const DistributionModel& model, std::size_t n, std::uint64_t seed,
                              const TestConfig& config);

}  // namespace tailtest
