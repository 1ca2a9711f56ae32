#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "tailtest/distributions.hpp"
#include "tailtest/error.hpp"

using namespace tailtest;

namespace {

std::vector<DistributionModel> all_models() {
    return {DistributionModel::exponential(0.5), DistributionModel::exponential(2.0),
            DistributionModel::lomax(0.5, 1.0),  DistributionModel::lomax(2.0, 3.0),
            DistributionModel::half_gaussian(1.0), DistributionModel::half_gaussian(2.5),
            DistributionModel::stretched_exponential(1.0, 0.5),
            DistributionModel::stretched_exponential(2.0, 0.3)};
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("evaluate matches closed forms") {
    const auto e = evaluate(DistributionModel::exponential(1.0), 0.0);
    CHECK(e.pdf == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.cdf == 0.0);
    CHECK(e.pdf_derivative == doctest::Approx(-1.0).epsilon(1e-15));

    const auto l = evaluate(DistributionModel::lomax(1.0, 1.0), 1.0);
    CHECK(l.pdf == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(l.cdf == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(l.pdf_derivative == doctest::Approx(-0.25).epsilon(1e-15));

    for (const auto& m : all_models()) {
        CAPTURE(m.name());
        CHECK(evaluate(m, 0.0).cdf == 0.0);
    }
}

TEST_CASE("evaluate rejects bad input") {
    CHECK_THROWS_AS(evaluate(DistributionModel::exponential(1.0), -1e-9), DomainError);
    CHECK_THROWS_AS(DistributionModel::exponential(0.0), DomainError);
    CHECK_THROWS_AS(DistributionModel::lomax(1.0, -1.0), DomainError);
    CHECK_THROWS_AS(DistributionModel::half_gaussian(std::nan("")), DomainError);
    CHECK_THROWS_AS(DistributionModel::stretched_exponential(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(DistributionModel::stretched_exponential(1.0, 0.0), DomainError);
}

TEST_CASE("quantile examples and domain") {
    CHECK(quantile(DistributionModel::exponential(1.0), 0.5) ==
          doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(quantile(DistributionModel::lomax(1.0, 1.0), 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    for (const auto& m : all_models()) {
        CAPTURE(m.name());
        CHECK(quantile(m, 0.0) == 0.0);
        CHECK_THROWS_AS(quantile(m, 1.0), DomainError);
        CHECK_THROWS_AS(quantile(m, -0.1), DomainError);
    }
}

TEST_CASE("quantile round-trips through cdf and is increasing") {
    for (const auto& m : all_models()) {
        CAPTURE(m.name());
        double prev = -1.0;
        double worst = 0.0;
        for (int j = 1; j <= 999; ++j) {
            const double u = j / 1000.0;
            const double x = quantile(m, u);
            worst = std::max(worst, std::abs(m.cdf(x) - u));
            CHECK(x > prev);
            prev = x;
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("half-gaussian quantile matches erf inverse to 1e-12") {
    const auto m = DistributionModel::half_gaussian(1.0);
    for (const double u : {1e-8, 0.01, 0.3, 0.5, 0.9, 0.999, 1 - 1e-9}) {
        const double x = quantile(m, u);
        // Compare on the tail side where cdf loses digits.
        CHECK(std::abs(m.survival(x) - (1.0 - u)) <= 1e-12 * std::max(1.0, (1.0 - u) * 1e3));
    }
}

TEST_CASE("pdf non-increasing, cdf non-decreasing, f' <= 0") {
    for (const auto& m : all_models()) {
        CAPTURE(m.name());
        double pdf_prev = m.pdf(0.0);
        double cdf_prev = 0.0;
        for (int j = 1; j <= 2000; ++j) {
            const double x = j * 0.01;
            const auto e = evaluate(m, x);
            CHECK(e.pdf <= pdf_prev);
            CHECK(e.cdf >= cdf_prev);
            CHECK(e.pdf_derivative <= 0.0);
            pdf_prev = e.pdf;
            cdf_prev = e.cdf;
        }
    }
}

TEST_CASE("hazard examples") {
    const auto e = hazard(DistributionModel::exponential(2.0), 3.7);
    CHECK(e.rate == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.rate_derivative == 0.0);

    const auto l = hazard(DistributionModel::lomax(1.0, 1.0), 0.0);
    CHECK(l.rate == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l.rate_derivative == doctest::Approx(-1.0).epsilon(1e-15));

    const auto h = hazard(DistributionModel::half_gaussian(1.0), 0.0);
    CHECK(h.rate == doctest::Approx(2.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(h.rate_derivative == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("hazard refuses points with vanishing tail mass") {
    CHECK_THROWS_AS(hazard(DistributionModel::half_gaussian(1.0), 40.0), DomainError);
    CHECK_THROWS_AS(hazard(DistributionModel::exponential(1.0), 1e4), DomainError);
}

TEST_CASE("analytic hazard derivative agrees with finite differences") {
    for (const auto& m : all_models()) {
        CAPTURE(m.name());
        for (int j = 1; j < 100; ++j) {
            const double u = j / 100.0 * 0.9;  // top 10% mass excluded
            const double x = quantile(m, u);
            const double h = 1e-5 * x;
            const double numeric = (hazard(m, x + h).rate - hazard(m, x - h).rate) / (2.0 * h);
            const double analytic = hazard(m, x).rate_derivative;
            CAPTURE(x);
            CHECK(std::abs(numeric - analytic) <= std::max(1e-6, 1e-4 * std::abs(analytic)));
        }
    }
}

TEST_CASE("sampling is reproducible and seed-sensitive") {
    const auto m = DistributionModel::exponential(1.0);
    const auto a = sample(m, 5, 7);
    const auto b = sample(m, 5, 7);
    CHECK(a == b);
    CHECK(sample(m, 5, 8) != a);
    CHECK_THROWS_AS(sample(m, 0, 1), DomainError);
    for (const double x : sample(DistributionModel::lomax(1.0, 1.0), 10000, 3)) {
        CHECK(std::isfinite(x));
        CHECK(x >= 0.0);
    }
}

TEST_CASE("exponential sample is within DKW distance of the cdf") {
    const auto m = DistributionModel::exponential(1.0);
    auto xs = sample(m, 1000000, 1);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double f = m.cdf(xs[j]);
        d = std::max({d, std::abs((j + 1) / n - f), std::abs(j / n - f)});
    }
    // DKW at 99%: sqrt(ln(2/0.01) / (2n)) = 0.00163 < 0.005.
    CHECK(d <= 0.005);
}

TEST_CASE("lomax sample median concentrates") {
    const auto m = DistributionModel::lomax(1.0, 1.0);
    auto xs = sample(m, 1000000, 1);
    std::nth_element(xs.begin(), xs.begin() + 500000, xs.end());
    const double median = xs[500000];
    const double target = quantile(m, 0.5);
    // sqrt(0.25/n) / f(median) = 0.0005 / 0.25
    const double binomial_sd = 0.002;
    CHECK(median >= 0.99 * target - 3 * binomial_sd);
    CHECK(median <= 1.01 * target + 3 * binomial_sd);
}

TEST_CASE("classify_tail on the canonical families") {
    for (const double alpha : {0.01, 0.25, 2.0}) {
        for (const double rho : {0.1, 0.5, 0.9}) {
            CHECK(classify_tail(DistributionModel::exponential(0.5), {alpha, rho}) == TailClass::light);
            CHECK(classify_tail(DistributionModel::exponential(3.0), {alpha, rho}) == TailClass::light);
            CHECK(classify_tail(DistributionModel::half_gaussian(1.0), {alpha, rho}) == TailClass::light);
        }
    }
    CHECK(classify_tail(DistributionModel::stretched_exponential(1.0, 0.5),
                        {0.25, 1.0 - std::exp(-1.0)}) == TailClass::heavy_at_least);
    for (const double rho : {0.25, 0.5, 0.75}) {
        CAPTURE(rho);
        CHECK(classify_tail(DistributionModel::lomax(1.0, 1.0), {(1 - rho) * (1 - rho), rho}) ==
              TailClass::heavy_at_least);
    }
    // Heavy everywhere but never by more than (1-u)^2: too much mass demanded.
    CHECK(classify_tail(DistributionModel::lomax(1.0, 1.0), {0.25, 0.6}) == TailClass::indeterminate);
    CHECK_THROWS_AS(classify_tail(DistributionModel::exponential(1.0), {0.25, 0.5}, 99), DomainError);
}

TEST_CASE("estimate_bounds on closed-form curvature") {
    const auto e = estimate_bounds(DistributionModel::exponential(1.0), 0.125);
    CHECK(e.beta == 1.0);
    // (F^-1)'' = 1/(1-y)^2 and (F^-1)''' = 2/(1-y)^3 at y = 7/8
    CHECK(e.b1 == doctest::Approx(64.0).epsilon(1e-12));
    CHECK(e.b2 == doctest::Approx(1024.0).epsilon(1e-4));
    CHECK(e.zeta == 0.125);
    CHECK(quantile_curvature(DistributionModel::exponential(1.0), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-15));

    // Lomax{1,1}: F^-1(y) = 1/(1-y) - 1, (F^-1)'' = 2/(1-y)^3, (F^-1)''' = 6/(1-y)^4
    const auto l = estimate_bounds(DistributionModel::lomax(1.0, 1.0), 0.125);
    CHECK(l.beta == 1.0);
    CHECK(l.b1 == doctest::Approx(1024.0).epsilon(1e-12));
    CHECK(l.b2 == doctest::Approx(24576.0).epsilon(1e-4));

    const auto s = estimate_bounds(DistributionModel::stretched_exponential(1.0, 0.5), 0.125);
    CHECK(std::isinf(s.beta));
    // F^-1(y) = t^2 with t = -ln(1-y): (F^-1)'' = 2(1+t)/(1-y)^2, max at y = 7/8.
    CHECK(s.b1 == doctest::Approx(2.0 * (1.0 + std::log(8.0)) * 64.0).epsilon(1e-9));
    CHECK(std::isfinite(s.b2));

    CHECK_THROWS_AS(estimate_bounds(DistributionModel::exponential(1.0), 0.0), DomainError);
}

TEST_CASE("parse_model") {
    const auto m = parse_model("lomax", "a=2,lambda=3");
    REQUIRE(m.family() == Family::lomax);
    CHECK(std::get<Lomax>(m.params()).shape == 2.0);
    CHECK(std::get<Lomax>(m.params()).scale == 3.0);
    CHECK(parse_model("stretched-exponential", "gamma=1,m=0.5").family() ==
          Family::stretched_exponential);
    CHECK(parse_model("half-gaussian", "sigma=2").family() == Family::half_gaussian);
    CHECK_THROWS_AS(parse_model("exponential", "lambda=1,mu=2"), DomainError);
    CHECK_THROWS_AS(parse_model("exponential", "rate=1"), DomainError);
    CHECK_THROWS_AS(parse_model("exponential", "lambda=abc"), DomainError);
    CHECK_THROWS_AS(parse_model("exponential", "lambda=-1"), DomainError);
    CHECK_THROWS_AS(parse_model("pareto", "a=1"), DomainError);
}

}  // TEST_SUITE
