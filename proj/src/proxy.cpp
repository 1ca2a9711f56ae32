#include "tailtest/proxy.hpp"

#include <cmath>
#include <sstream>

#include "tailtest/error.hpp"

namespace tailtest {

double smoothness_denominator(const WellBehavedBounds& bounds, GapConvention convention) {
    const double b = convention == GapConvention::beta_cubed_b1 ? bounds.b1 : bounds.b2;
    return bounds.beta * bounds.beta * bounds.beta * b;
}

double proxy_S(const DistributionModel& model, double z) {
    if (!(z > 0.0 && z < 1.0)) {
        std::ostringstream msg;
        msg << "proxy level must lie in (0, 1), got " << z;
        throw DomainError(msg.str());
    }
    const double x = quantile(model, z);
    const double score = model.score(x);
    if (!(score < 0.0)) {
        std::ostringstream msg;
        msg << "proxy undefined for " << model.name() << " at z=" << z << ": f'(F^-1(z)) = 0";
        throw SingularError(msg.str());
    }
    // -f^2/f' = f / (-f'/f)
    return model.pdf(x) / -score;
}

ThresholdGap threshold_and_gap(double z, double alpha, const WellBehavedBounds& bounds,
                               GapConvention convention) {
    if (!(z > 0.0 && z < 1.0)) throw DomainError("threshold level must lie in (0, 1)");
    if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
    const double r = 1.0 - z;
    const double denom = smoothness_denominator(bounds, convention);
    return {r, alpha * r * r / denom};
}

double discrete_S_tilde(const DistributionModel& model, int i, int k) {
    if (k < 4) throw DomainError("k must be >= 4");
    if (i < 0 || i > k - 2) {
        std::ostringstream msg;
        msg << "bucket index " << i << " outside [0, " << k - 2 << "]";
        throw DomainError(msg.str());
    }
    const double kd = k;
    const double y = i / kd;
    const double fine = 1.0 / (kd * kd);
    const double coarse = 1.0 / kd;

    const double base = quantile(model, y);
    const double base_fine = quantile(model, y + fine);
    const double next = quantile(model, y + coarse);
    const double next_fine = quantile(model, y + coarse + fine);

    const double numer = base_fine - base;
    const double denom = kd * ((next_fine - next) - (base_fine - base));
    if (!(denom > 0.0)) {
        std::ostringstream msg;
        msg << "non-positive length change at i=" << i << ", k=" << k << " for " << model.name();
        throw SingularError(msg.str());
    }
    return numer / denom;
}

std::vector<ProxyEntry> proxy_curve(const DistributionModel& model, std::span<const double> zs,
                                    double alpha, const WellBehavedBounds& bounds,
                                    GapConvention convention) {
    std::vector<ProxyEntry> out;
    out.reserve(zs.size());
    for (const double z : zs) {
        if (!out.empty() && !(z > out.back().z)) {
            throw DomainError("proxy grid must be strictly increasing");
        }
        const auto tg = threshold_and_gap(z, alpha, bounds, convention);
        out.push_back({z, proxy_S(model, z), tg.threshold, tg.gap});
    }
    return out;
}

}  // namespace tailtest
