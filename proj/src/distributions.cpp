#include "tailtest/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "tailtest/error.hpp"

namespace tailtest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// Acklam's rational approximation to the standard normal quantile for a
// lower-tail probability p in (0, 0.5]. Relative error about 1.15e-9.
double normal_quantile_approx(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549671035206161e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// z >= 0 with P(Z > z) = tail for a standard normal Z, tail in (0, 0.5].
// Two Newton steps on 0.5*erfc(z/sqrt 2) - tail bring the rational
// approximation to full double precision.
double normal_upper_quantile(double tail) {
    double z = -normal_quantile_approx(tail);
    for (int step = 0; step < 2; ++step) {
        const double err = 0.5 * std::erfc(z / std::numbers::sqrt2) - tail;
        const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        z += err / density;
    }
    return std::max(z, 0.0);
}

double family_pdf(const DistributionModel::Params& p, double x) {
    return std::visit(
        overloaded{
            [x](const Exponential& d) { return d.rate * std::exp(-d.rate * x); },
            [x](const Lomax& d) {
                return d.shape / d.scale * std::pow(1.0 + x / d.scale, -(d.shape + 1.0));
            },
            [x](const HalfGaussian& d) {
                const double t = x / d.sigma;
                return std::numbers::sqrt2 / (d.sigma * std::sqrt(std::numbers::pi)) *
                       std::exp(-0.5 * t * t);
            },
            [x](const StretchedExponential& d) {
                if (x == 0.0) return kInf;
                const double xm = std::pow(x, d.exponent);
                return d.rate * d.exponent * xm / x * std::exp(-d.rate * xm);
            },
        },
        p);
}

double family_survival(const DistributionModel::Params& p, double x) {
    return std::visit(
        overloaded{
            [x](const Exponential& d) { return std::exp(-d.rate * x); },
            [x](const Lomax& d) { return std::exp(-d.shape * std::log1p(x / d.scale)); },
            [x](const HalfGaussian& d) {
                return std::erfc(x / (d.sigma * std::numbers::sqrt2));
            },
            [x](const StretchedExponential& d) {
                return std::exp(-d.rate * std::pow(x, d.exponent));
            },
        },
        p);
}

double family_cdf(const DistributionModel::Params& p, double x) {
    return std::visit(
        overloaded{
            [x](const Exponential& d) { return -std::expm1(-d.rate * x); },
            [x](const Lomax& d) { return -std::expm1(-d.shape * std::log1p(x / d.scale)); },
            [x](const HalfGaussian& d) { return std::erf(x / (d.sigma * std::numbers::sqrt2)); },
            [x](const StretchedExponential& d) {
                return -std::expm1(-d.rate * std::pow(x, d.exponent));
            },
        },
        p);
}

double family_score(const DistributionModel::Params& p, double x) {
    return std::visit(
        overloaded{
            [](const Exponential& d) { return -d.rate; },
            [x](const Lomax& d) { return -(d.shape + 1.0) / (d.scale + x); },
            [x](const HalfGaussian& d) { return -x / (d.sigma * d.sigma); },
            [x](const StretchedExponential& d) {
                if (x == 0.0) return -kInf;
                return (d.exponent - 1.0) / x -
                       d.rate * d.exponent * std::pow(x, d.exponent - 1.0);
            },
        },
        p);
}

double family_quantile(const DistributionModel::Params& p, double u) {
    return std::visit(
        overloaded{
            [u](const Exponential& d) { return -std::log1p(-u) / d.rate; },
            [u](const Lomax& d) { return d.scale * std::expm1(-std::log1p(-u) / d.shape); },
            [u](const HalfGaussian& d) {
                if (u == 0.0) return 0.0;
                return d.sigma * normal_upper_quantile(0.5 * (1.0 - u));
            },
            [u](const StretchedExponential& d) {
                return std::pow(-std::log1p(-u) / d.rate, 1.0 / d.exponent);
            },
        },
        p);
}

Hazard family_hazard(const DistributionModel::Params& p, double x, double pdf, double survival) {
    return std::visit(
        overloaded{
            [](const Exponential& d) { return Hazard{d.rate, 0.0}; },
            [x](const Lomax& d) {
                const double r = d.shape / (d.scale + x);
                return Hazard{r, -r / (d.scale + x)};
            },
            [&](const HalfGaussian& d) {
                const double r = pdf / survival;
                return Hazard{r, r * (r - x / (d.sigma * d.sigma))};
            },
            [x](const StretchedExponential& d) {
                if (x == 0.0) return Hazard{kInf, -kInf};
                const double r = d.rate * d.exponent * std::pow(x, d.exponent - 1.0);
                return Hazard{r, r * (d.exponent - 1.0) / x};
            },
        },
        p);
}

void require_x(double x) {
    if (!(x >= 0.0) || std::isinf(x)) {
        std::ostringstream msg;
        msg << "point must be finite and >= 0, got " << x;
        throw DomainError(msg.str());
    }
}

}  // namespace

DistributionModel::DistributionModel(Params params) : params_(params) {
    const bool ok = std::visit(
        overloaded{
            [](const Exponential& d) { return positive(d.rate); },
            [](const Lomax& d) { return positive(d.shape) && positive(d.scale); },
            [](const HalfGaussian& d) { return positive(d.sigma); },
            [](const StretchedExponential& d) {
                return positive(d.rate) && positive(d.exponent) && d.exponent < 1.0;
            },
        },
        params_);
    if (!ok) throw DomainError("invalid parameters for " + name());
}

Family DistributionModel::family() const noexcept {
    return static_cast<Family>(params_.index());
}

std::string DistributionModel::name() const {
    std::ostringstream out;
    out.precision(17);
    std::visit(overloaded{
                   [&](const Exponential& d) { out << "exponential(lambda=" << d.rate << ")"; },
                   [&](const Lomax& d) {
                       out << "lomax(a=" << d.shape << ",lambda=" << d.scale << ")";
                   },
                   [&](const HalfGaussian& d) { out << "half-gaussian(sigma=" << d.sigma << ")"; },
                   [&](const StretchedExponential& d) {
                       out << "stretched-exponential(gamma=" << d.rate << ",m=" << d.exponent
                           << ")";
                   },
               },
               params_);
    return out.str();
}

double DistributionModel::pdf(double x) const { return family_pdf(params_, x); }
double DistributionModel::cdf(double x) const { return family_cdf(params_, x); }
double DistributionModel::survival(double x) const { return family_survival(params_, x); }
double DistributionModel::score(double x) const { return family_score(params_, x); }

double DistributionModel::pdf_derivative(double x) const {
    const double f = pdf(x);
    const double s = score(x);
    // f'(0) = 0 for the half-Gaussian; avoid 0 * inf elsewhere.
    if (s == 0.0) return -0.0;
    return f * s;
}

void TailParams::validate() const {
    if (!positive(alpha)) throw DomainError("alpha must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0, 1)");
}

void WellBehavedBounds::validate() const {
    if (!(beta > 0.0)) throw DomainError("beta must be > 0");
    if (!positive(b1)) throw DomainError("b1 must be finite and > 0");
    if (!positive(b2)) throw DomainError("b2 must be finite and > 0");
    if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0, 1)");
}

const char* to_string(TailClass c) noexcept {
    switch (c) {
        case TailClass::light: return "light";
        case TailClass::heavy_at_least: return "heavy";
        case TailClass::indeterminate: return "indeterminate";
    }
    return "?";
}

Evaluation evaluate(const DistributionModel& model, double x) {
    require_x(x);
    return {model.pdf(x), model.cdf(x), model.pdf_derivative(x)};
}

double quantile(const DistributionModel& model, double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << "quantile level must lie in [0, 1), got " << u;
        throw DomainError(msg.str());
    }
    return family_quantile(model.params(), u);
}

Hazard hazard(const DistributionModel& model, double x) {
    require_x(x);
    const double s = model.survival(x);
    if (s <= 0.0) {
        std::ostringstream msg;
        msg << "hazard undefined at x=" << x << ": 1-F(x) underflows to 0";
        throw DomainError(msg.str());
    }
    return family_hazard(model.params(), x, model.pdf(x), s);
}

double quantile_curvature(const DistributionModel& model, double y) {
    const double x = quantile(model, y);
    if (x == 0.0) {
        if (const auto* se = std::get_if<StretchedExponential>(&model.params())) {
            // -f'/f^3 ~ (1-m)/(gamma m)^2 * x^(1-2m) as x -> 0.
            const double m = se->exponent;
            if (m < 0.5) return 0.0;
            if (m > 0.5) return kInf;
            return (1.0 - m) / (se->rate * se->rate * m * m);
        }
    }
    const double f = model.pdf(x);
    return -model.score(x) / (f * f);
}

std::vector<double> sample(const DistributionModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("sample count must be >= 1");
    std::mt19937_64 engine(seed);
    constexpr double kScale = 0x1.0p-53;
    std::vector<double> out(n);
    for (auto& x : out) {
        const double u = (static_cast<double>(engine() >> 11) + 0.5) * kScale;
        x = family_quantile(model.params(), u);
    }
    return out;
}

TailClass classify_tail(const DistributionModel& model, const TailParams& tail,
                        std::size_t grid_size) {
    if (grid_size < 100) throw DomainError("grid_size must be >= 100");
    tail.validate();

    bool light = true;
    std::size_t run = 0;
    std::size_t best_run = 0;
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(grid_size);
        const double dh = hazard(model, quantile(model, u)).rate_derivative;
        if (dh < -1e-12) light = false;
        run = dh < -tail.alpha ? run + 1 : 0;
        best_run = std::max(best_run, run);
    }
    if (light) return TailClass::light;
    if (static_cast<double>(best_run) / static_cast<double>(grid_size) >= tail.rho) {
        return TailClass::heavy_at_least;
    }
    return TailClass::indeterminate;
}

WellBehavedBounds estimate_bounds(const DistributionModel& model, double zeta) {
    if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0, 1)");
    constexpr std::size_t kGrid = 10000;
    const double top = 1.0 - zeta;
    const double step = std::min(1e-5, zeta / 10.0);

    WellBehavedBounds out{model.pdf(0.0), 0.0, 0.0, zeta};
    for (std::size_t j = 0; j < kGrid; ++j) {
        const double y = top * static_cast<double>(j) / static_cast<double>(kGrid - 1);
        const double curvature = quantile_curvature(model, y);
        out.b1 = std::max(out.b1, std::abs(curvature));

        // Forward difference where the left stencil point would leave [0, 1).
        double third;
        if (y < step) {
            third = (quantile_curvature(model, y + step) - curvature) / step;
        } else {
            third = (quantile_curvature(model, y + step) - quantile_curvature(model, y - step)) /
                    (2.0 * step);
        }
        out.b2 = std::max(out.b2, std::abs(third));
    }
    return out;
}

DistributionModel parse_model(const std::string& family, const std::string& params) {
    std::map<std::string, double> kv;
    std::istringstream in(params);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw DomainError("parameter '" + item + "' is not KEY=VALUE");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) {
            throw DomainError("parameter '" + key + "' has non-numeric value '" + value + "'");
        }
        if (!kv.emplace(key, v).second) throw DomainError("parameter '" + key + "' repeated");
    }

    auto take = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DomainError(family + " requires parameter '" + key + "'");
        const double v = it->second;
        kv.erase(it);
        return v;
    };

    DistributionModel::Params p;
    if (family == "exponential") {
        p = Exponential{take("lambda")};
    } else if (family == "lomax") {
        const double a = take("a");
        p = Lomax{a, take("lambda")};
    } else if (family == "half-gaussian") {
        p = HalfGaussian{take("sigma")};
    } else if (family == "stretched-exponential") {
        const double g = take("gamma");
        p = StretchedExponential{g, take("m")};
    } else {
        throw DomainError("unknown distribution '" + family + "'");
    }
    if (!kv.empty()) {
        throw DomainError("unknown parameter '" + kv.begin()->first + "' for " + family);
    }
    return DistributionModel(p);
}

}  // namespace tailtest
