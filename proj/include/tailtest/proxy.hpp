#pragma once

#include <span>
#include <vector>

#include "tailtest/distributions.hpp"

namespace tailtest {

// Which smoothness constant sits in the gap denominator. The headline
// statement of the separation result uses beta^3 * B1; its derivation
// carries beta^3 * B2.
enum class GapConvention { beta_cubed_b1, beta_cubed_b2 };

double smoothness_denominator(const WellBehavedBounds& bounds,
                              GapConvention convention = GapConvention::beta_cubed_b1);

struct ThresholdGap {
    double threshold;  // 1 - z
    double gap;        // alpha (1-z)^2 / D

    // Heavy decision boundary: threshold - gap / 2.
    double boundary() const noexcept { return threshold - 0.5 * gap; }
};

/// S(z) = L(z) / L'(z) = -f(x)^2 / f'(x) at x = F^-1(z).
///
/// Light-tailed distributions have S(z) > 1 - z; the exponential sits
/// exactly on 1 - z. Throws SingularError where f'(F^-1(z)) = 0 and
/// DomainError for z outside (0, 1).
double proxy_S(const DistributionModel& model, double z);

// Gap is computed with alpha taken as given (alpha = 0 gives a zero gap).
ThresholdGap threshold_and_gap(double z, double alpha, const WellBehavedBounds& bounds,
                               GapConvention convention = GapConvention::beta_cubed_b1);

inline ThresholdGap threshold_and_gap(double z, const TailParams& tail,
                                      const WellBehavedBounds& bounds,
                                      GapConvention convention = GapConvention::beta_cubed_b1) {
    return threshold_and_gap(z, tail.alpha, bounds, convention);
}

/// Two-granularity difference-quotient approximation of S at y = i/k:
/// fine step 1/k^2 for lengths, coarse step 1/k for their change,
///
///   (I(y + 1/k^2) - I(y)) / (k (I(y + 1/k + 1/k^2) - I(y + 1/k) - I(y + 1/k^2) + I(y)))
///
/// with I = F^-1. Valid for 0 <= i <= k-2, k >= 4.
double discrete_S_tilde(const DistributionModel& model, int i, int k);

struct ProxyEntry {
    double z;
    double s;
    double threshold;
    double gap;
};

// S(z), 1-z and the gap on an increasing grid of z in (0, 1).
std::vector<ProxyEntry> proxy_curve(const DistributionModel& model, std::span<const double> zs,
                                    double alpha, const WellBehavedBounds& bounds,
                                    GapConvention convention = GapConvention::beta_cubed_b1);

}  // namespace tailtest
