#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tailtest/error.hpp"
#include "tailtest/proxy.hpp"

using namespace tailtest;

namespace {

// L(z)/L'(z) from difference quotients of the quantile function alone.
double proxy_by_differences(const DistributionModel& m, double z, double h) {
    const double lo = quantile(m, z - h);
    const double mid = quantile(m, z);
    const double hi = quantile(m, z + h);
    const double length = (hi - lo) / (2 * h);
    const double change = (hi - 2 * mid + lo) / (h * h);
    return length / change;
}

// Two-granularity difference ratio evaluated directly from closed-form quantiles.
double s_tilde_exponential(int i, int k) {
    auto q = [](double u) { return -std::log1p(-u); };
    const double y = static_cast<double>(i) / k;
    const double a = 1.0 / (static_cast<double>(k) * k);
    const double b = 1.0 / k;
    return (q(y + a) - q(y)) / (k * (q(y + b + a) - q(y + b) - q(y + a) + q(y)));
}

double max_s_tilde_error(const DistributionModel& m, int k, bool only_small_s) {
    double worst = 0.0;
    for (int i = 2; i <= k - 2; ++i) {
        const double s = proxy_S(m, static_cast<double>(i) / k);
        if (only_small_s && s > 1.0) continue;
        worst = std::max(worst, std::abs(discrete_S_tilde(m, i, k) - s));
    }
    return worst;
}

std::vector<double> z_grid() {
    std::vector<double> zs;
    for (int j = 1; j <= 99; ++j) zs.push_back(j / 100.0);
    return zs;
}

}  // namespace

TEST_SUITE("proxy") {

TEST_CASE("proxy_S examples") {
    for (const double lambda : {0.5, 1.0, 2.0, 7.0}) {
        CHECK(proxy_S(DistributionModel::exponential(lambda), 0.25) ==
              doctest::Approx(0.75).epsilon(1e-12));
    }
    CHECK(proxy_S(DistributionModel::lomax(1.0, 1.0), 0.5) == doctest::Approx(0.25).epsilon(1e-12));

    const auto hg = DistributionModel::half_gaussian(1.0);
    const double s = proxy_S(hg, 0.5);
    CHECK(s == doctest::Approx(proxy_by_differences(hg, 0.5, 1e-4)).epsilon(1e-6));
    CHECK(s == doctest::Approx(0.942272503301127).epsilon(1e-12));  // scipy erfinv, sigma^2 f(x)/x
    CHECK(s > 0.5);
}

TEST_CASE("proxy_S domain and singular points") {
    const auto hg = DistributionModel::half_gaussian(1.0);
    CHECK_THROWS_AS(proxy_S(hg, 0.0), DomainError);
    CHECK_THROWS_AS(proxy_S(hg, 1.0), DomainError);
    // The quantile rounds to the origin, where the half-Gaussian density is flat.
    CHECK_THROWS_AS(proxy_S(hg, 1e-300), SingularError);
}

TEST_CASE("exponential sits exactly on the threshold") {
    for (const double lambda : {0.5, 1.0, 2.0}) {
        for (const double z : z_grid()) {
            CHECK(std::abs(proxy_S(DistributionModel::exponential(lambda), z) - (1 - z)) <= 1e-9);
        }
    }
}

TEST_CASE("lomax proxy is a/(a+1) times the threshold") {
    for (const double a : {0.5, 1.0, 2.0}) {
        for (const double lambda : {0.5, 1.0, 2.0}) {
            for (const double z : z_grid()) {
                const double expected = a / (a + 1) * (1 - z);
                CHECK(std::abs(proxy_S(DistributionModel::lomax(a, lambda), z) - expected) <= 1e-9);
            }
        }
    }
}

TEST_CASE("light and heavy sides of the threshold") {
    for (const double sigma : {0.5, 1.0, 3.0}) {
        for (const double z : z_grid()) {
            CHECK(proxy_S(DistributionModel::half_gaussian(sigma), z) > 1 - z);
        }
    }
    for (const double z : z_grid()) {
        CHECK(proxy_S(DistributionModel::stretched_exponential(1.0, 0.5), z) < 1 - z);
    }
}

TEST_CASE("proxy is invariant to rescaling x") {
    const double c = 3.7;
    for (const double z : z_grid()) {
        const double e1 = proxy_S(DistributionModel::exponential(2.0), z);
        const double e2 = proxy_S(DistributionModel::exponential(2.0 / c), z);
        CHECK(std::abs(e1 - e2) <= 1e-12 * std::abs(e1));
        const double l1 = proxy_S(DistributionModel::lomax(1.5, 1.0), z);
        const double l2 = proxy_S(DistributionModel::lomax(1.5, c), z);
        CHECK(std::abs(l1 - l2) <= 1e-12 * std::abs(l1));
    }
}

TEST_CASE("threshold_and_gap") {
    const WellBehavedBounds unit{1, 1, 1, 0.01};
    CHECK(threshold_and_gap(0.3, 0.0, unit).gap == 0.0);

    const auto mid = threshold_and_gap(0.5, TailParams{0.25, 0.5}, unit);
    CHECK(mid.threshold == 0.5);
    CHECK(mid.gap == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(mid.boundary() == doctest::Approx(0.46875).epsilon(1e-15));
    CHECK(threshold_and_gap(0.9, 0.25, unit).gap == doctest::Approx(0.0025).epsilon(1e-12));

    const WellBehavedBounds b{2.0, 3.0, 5.0, 0.01};
    CHECK(threshold_and_gap(0.5, 1.0, b).gap == doctest::Approx(0.25 / 24.0).epsilon(1e-15));
    CHECK(threshold_and_gap(0.5, 1.0, b, GapConvention::beta_cubed_b2).gap ==
          doctest::Approx(0.25 / 40.0).epsilon(1e-15));
    CHECK_THROWS_AS(threshold_and_gap(1.0, 0.25, unit), DomainError);
}

TEST_CASE("discrete_S_tilde examples") {
    const auto e = DistributionModel::exponential(1.0);
    CHECK(discrete_S_tilde(e, 1, 4) == doctest::Approx(s_tilde_exponential(1, 4)).epsilon(1e-12));
    CHECK(discrete_S_tilde(e, 1, 4) == doctest::Approx(0.4676018258061697).epsilon(1e-10));
    CHECK(discrete_S_tilde(e, 8, 32) == doctest::Approx(s_tilde_exponential(8, 32)).epsilon(1e-9));
    CHECK(discrete_S_tilde(e, 8, 32) == doctest::Approx(0.7182615020713053).epsilon(1e-9));

    const double err32 = std::abs(discrete_S_tilde(e, 8, 32) - 0.75);
    const double err64 = std::abs(discrete_S_tilde(e, 16, 64) - 0.75);
    CHECK(err64 <= 0.75 * err32);

    CHECK_THROWS_AS(discrete_S_tilde(e, 15, 16), DomainError);
    CHECK_THROWS_AS(discrete_S_tilde(e, 1, 3), DomainError);
}

TEST_CASE("discrete_S_tilde converges as k doubles") {
    struct Case {
        DistributionModel model;
        bool only_small_s;
    };
    const std::vector<Case> cases{{DistributionModel::exponential(1.0), false},
                                  {DistributionModel::lomax(1.0, 1.0), false},
                                  {DistributionModel::lomax(2.0, 0.5), false},
                                  {DistributionModel::half_gaussian(1.0), true},
                                  {DistributionModel::stretched_exponential(1.0, 0.5), true}};
    for (const auto& c : cases) {
        CAPTURE(c.model.name());
        double prev = INFINITY;
        for (const int k : {16, 32, 64, 128}) {
            const double err = max_s_tilde_error(c.model, k, c.only_small_s);
            CHECK(err <= prev);
            const auto b = estimate_bounds(c.model, 1.0 / (2 * k));
            CHECK(err <= 6 * b.beta * (2 * b.b1 + b.b2) / k);
            prev = err;
        }
    }
}

TEST_CASE("proxy_curve carries threshold and gap") {
    const std::vector<double> zs{0.1, 0.5, 0.9};
    const WellBehavedBounds unit{1, 1, 1, 0.01};
    const auto curve = proxy_curve(DistributionModel::lomax(1.0, 1.0), zs, 0.25, unit);
    REQUIRE(curve.size() == 3);
    for (const auto& e : curve) {
        CHECK(e.threshold == 1 - e.z);
        CHECK(e.gap >= 0.0);
        CHECK(e.s == doctest::Approx(0.5 * (1 - e.z)).epsilon(1e-12));
    }
    const std::vector<double> bad{0.5, 0.5};
    CHECK_THROWS_AS(proxy_curve(DistributionModel::lomax(1.0, 1.0), bad, 0.25, unit), DomainError);
}

}  // TEST_SUITE
