#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tailtest {

// Analytic families on [0, inf) with non-increasing densities.
struct Exponential {
    double rate;  // lambda
};

struct Lomax {
    double shape;  // a
    double scale;  // lambda
};

struct HalfGaussian {
    double sigma;
};

// F(x) = 1 - exp(-rate * x^exponent), 0 < exponent < 1.
struct StretchedExponential {
    double rate;      // gamma
    double exponent;  // m
};

enum class Family { exponential, lomax, half_gaussian, stretched_exponential };

class DistributionModel {
public:
    using Params = std::variant<Exponential, Lomax, HalfGaussian, StretchedExponential>;

    // Throws DomainError on non-positive / non-finite parameters.
    DistributionModel(Params params);  // NOLINT(google-explicit-constructor)

    static DistributionModel exponential(double rate) { return {Exponential{rate}}; }
    static DistributionModel lomax(double shape, double scale) { return {Lomax{shape, scale}}; }
    static DistributionModel half_gaussian(double sigma) { return {HalfGaussian{sigma}}; }
    static DistributionModel stretched_exponential(double rate, double exponent) {
        return {StretchedExponential{rate, exponent}};
    }

    Family family() const noexcept;
    const Params& params() const noexcept { return params_; }
    std::string name() const;

    // Raw closed forms; callers are expected to have validated x >= 0.
    double pdf(double x) const;
    double cdf(double x) const;
    double survival(double x) const;  // 1 - F(x), computed without cancellation
    double score(double x) const;     // f'(x) / f(x)
    double pdf_derivative(double x) const;

private:
    Params params_;
};

struct Evaluation {
    double pdf;
    double cdf;
    double pdf_derivative;
};

struct Hazard {
    double rate;
    double rate_derivative;
};

struct TailParams {
    double alpha;  // minimum magnitude of the hazard-rate drop
    double rho;    // probability mass of the heavy region

    void validate() const;
};

// Smoothness constants of a well-behaved distribution. `beta` is +inf for
// densities unbounded at the origin (stretched exponential).
struct WellBehavedBounds {
    double beta;  // sup f
    double b1;    // Lipschitz constant of (F^-1)' on [0, 1 - zeta]
    double b2;    // Lipschitz constant of (F^-1)'' on [0, 1 - zeta]
    double zeta;  // edge margin

    void validate() const;
};

enum class TailClass { light, heavy_at_least, indeterminate };

const char* to_string(TailClass c) noexcept;

Evaluation evaluate(const DistributionModel& model, double x);

// Inverse CDF on [0, 1).
double quantile(const DistributionModel& model, double u);

// Hazard rate f/(1-F) and its analytic derivative.
Hazard hazard(const DistributionModel& model, double x);

// (F^-1)''(y) = -f'(x)/f(x)^3 at x = F^-1(y).
double quantile_curvature(const DistributionModel& model, double y);

/// Inverse-transform sampling. Uniforms come from std::mt19937_64 seeded
/// with `seed`; each 64-bit draw w maps to u = ((w >> 11) + 0.5) * 2^-53,
/// which lies strictly inside (0, 1). Output is in generation order.
std::vector<double> sample(const DistributionModel& model, std::size_t n, std::uint64_t seed);

/// Ground-truth classification on the quantile grid u_j = j / grid_size,
/// j = 0..grid_size-1. Each grid point carries mass 1/grid_size, so a run
/// of r consecutive points with H' < -alpha spans mass r / grid_size.
TailClass classify_tail(const DistributionModel& model, const TailParams& tail,
                        std::size_t grid_size = 1000);

// Grid estimate of the smoothness constants (10^4 points on [0, 1-zeta]).
WellBehavedBounds estimate_bounds(const DistributionModel& model, double zeta);

// Parses "exponential", "lomax", "half-gaussian", "stretched-exponential"
// with a parameter list like "a=1,lambda=1". Unknown or missing keys throw.
DistributionModel parse_model(const std::string& family, const std::string& params);

}  // namespace tailtest
