#include "tailtest/tester.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailtest/error.hpp"

namespace tailtest {

namespace {

void require_finite_bounds(const WellBehavedBounds& b) {
    b.validate();
    if (!std::isfinite(b.beta)) throw DomainError("beta must be finite for complexity bounds");
}

Verdict decide(const std::vector<BucketRecord>& records) {
    const bool heavy = std::any_of(records.begin(), records.end(), [](const BucketRecord& r) {
        return r.s_hat && *r.s_hat < r.boundary;
    });
    return heavy ? Verdict::heavy : Verdict::light;
}

}  // namespace

const char* to_string(Verdict v) noexcept { return v == Verdict::heavy ? "heavy" : "light"; }

void TestConfig::validate() const {
    tail.validate();
    bounds.validate();
    if (k < 4) throw DomainError("k must be >= 4");
    if (k < 4.0 / tail.rho) {
        std::ostringstream msg;
        msg << "k=" << k << " is below 4/rho=" << 4.0 / tail.rho;
        throw DomainError(msg.str());
    }
    if (bounds.zeta > 1.0 / (2.0 * k)) {
        std::ostringstream msg;
        msg << "zeta=" << bounds.zeta << " exceeds 1/(2k)=" << 1.0 / (2.0 * k);
        throw DomainError(msg.str());
    }
    if (!(c_k > 0.0) || !(c_n > 0.0)) throw DomainError("complexity constants must be > 0");
    if (variant == Variant::weak) {
        if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) throw DomainError("need 0 < c1 < c2 < 1");
        if (first_bucket() > last_bucket()) throw DomainError("weak range [c1 k, c2 k] is empty");
    }
}

int TestConfig::first_bucket() const {
    if (variant == Variant::full) return 2;
    return std::max(1, static_cast<int>(std::ceil(c1 * k)));
}

int TestConfig::last_bucket() const {
    if (variant == Variant::full) return k - 2;
    return std::min(k - 2, static_cast<int>(std::floor(c2 * k)));
}

int required_buckets(const TailParams& tail, const WellBehavedBounds& bounds, double c_k) {
    tail.validate();
    require_finite_bounds(bounds);
    if (!(c_k > 0.0)) throw DomainError("c_k must be > 0");
    const double beta4 = std::pow(bounds.beta, 4);
    const double smooth = c_k * bounds.b2 * beta4 * (2.0 * bounds.b1 + bounds.b2) / tail.alpha;
    const double k = std::ceil(std::max(smooth, 4.0 / tail.rho));
    if (!(k < 1e9)) throw DomainError("required bucket count overflows");
    return std::max(4, static_cast<int>(k));
}

std::size_t required_samples(int k, const TailParams& tail, const WellBehavedBounds& bounds,
                             double c_n, SampleComplexityForm form) {
    if (k < 4) throw DomainError("k must be >= 4");
    tail.validate();
    require_finite_bounds(bounds);
    if (!(c_n > 0.0)) throw DomainError("c_n must be > 0");
    const double kd = k;
    const double smooth = form == SampleComplexityForm::statement
                              ? std::pow(bounds.b1, 1.5) * bounds.beta * bounds.beta
                              : std::pow(bounds.beta, 3) * std::pow(bounds.b2, 1.5);
    const double n = std::ceil(c_n * kd * kd * kd * std::log(kd) * smooth / tail.alpha);
    if (!(n < 1e18)) throw DomainError("required sample count overflows");
    return std::max(static_cast<std::size_t>(n),
                    static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
}

double decision_boundary(const TestConfig& config, int i) {
    const double z = static_cast<double>(i) / config.k;
    return threshold_and_gap(z, config.tail, config.bounds, config.gap_convention).boundary();
}

TestOutcome run_full_test(const FourSplits& splits, const TestConfig& config) {
    if (config.variant != Variant::full) throw DomainError("run_full_test needs the full variant");
    config.validate();
    const BucketGrid grid = extract_bucket_grid(splits, config.k);

    TestOutcome out;
    out.n = splits[0].size();
    out.config = config;
    for (int i = config.first_bucket(); i <= config.last_bucket(); ++i) {
        out.records.push_back({i, hat_S(grid, i), decision_boundary(config, i)});
    }
    out.verdict = decide(out.records);
    return out;
}

TestOutcome run_weak_test(const SortedSampleSplit& split, const TestConfig& config) {
    if (config.variant != Variant::weak) throw DomainError("run_weak_test needs the weak variant");
    config.validate();

    TestOutcome out;
    out.n = split.size();
    out.config = config;
    for (int i = config.first_bucket(); i <= config.last_bucket(); ++i) {
        out.records.push_back({i, hat_S_weak(split, i, config.k), decision_boundary(config, i)});
    }
    out.verdict = decide(out.records);
    return out;
}

TestOutcome run_test_on_model(const DistributionModel& model, std::size_t n, std::uint64_t seed,
                              const TestConfig& config) {
    TestOutcome out;
    if (config.variant == Variant::full) {
        const auto draw = sample(model, 4 * n, seed);
        out = run_full_test(split_round_robin(draw), config);
    } else {
        out = run_weak_test(SortedSampleSplit::from_unsorted(sample(model, n, seed)), config);
    }
    out.seed = seed;
    return out;
}

}  // namespace tailtest
