#include "biruin/heavy_tails.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace biruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

const char* to_string(TailClass c) noexcept {
    switch (c) {
        case TailClass::subexponential: return "subexponential";
        case TailClass::erv: return "erv";
        case TailClass::light: return "light";
    }
    return "unknown";
}

ClaimDistribution::ClaimDistribution(Kind kind) : kind_(kind) {
    std::visit(overloaded{
                   [](const Pareto& d) {
                       require(positive_finite(d.alpha), "pareto: alpha must be > 0");
                       require(positive_finite(d.xm), "pareto: xm must be > 0");
                   },
                   [](const Weibull& d) {
                       require(std::isfinite(d.k) && d.k > 0.0 && d.k < 1.0,
                               "weibull: shape k must lie in (0, 1)");
                       require(positive_finite(d.scale), "weibull: scale must be > 0");
                   },
                   [](const Lognormal& d) {
                       require(std::isfinite(d.mu), "lognormal: mu must be finite");
                       require(positive_finite(d.s), "lognormal: s must be > 0");
                   },
                   [](const Exponential& d) {
                       require(positive_finite(d.rate), "exponential: rate must be > 0");
                   },
               },
               kind_);
}

TailClass ClaimDistribution::tail_class() const noexcept {
    return std::holds_alternative<Exponential>(kind_) ? TailClass::light
                                                      : TailClass::subexponential;
}

double ClaimDistribution::tail(double x) const noexcept {
    return std::visit(overloaded{
                          [x](const Pareto& d) {
                              return x <= d.xm ? 1.0 : std::pow(d.xm / x, d.alpha);
                          },
                          [x](const Weibull& d) {
                              return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / d.scale, d.k));
                          },
                          [x](const Lognormal& d) {
                              return x <= 0.0 ? 1.0 : normal_tail((std::log(x) - d.mu) / d.s);
                          },
                          [x](const Exponential& d) {
                              return x <= 0.0 ? 1.0 : std::exp(-d.rate * x);
                          },
                      },
                      kind_);
}

double ClaimDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
    return std::visit(overloaded{
                          [p](const Pareto& d) { return d.xm * std::pow(1.0 - p, -1.0 / d.alpha); },
                          [p](const Weibull& d) {
                              return d.scale * std::pow(-std::log1p(-p), 1.0 / d.k);
                          },
                          [p](const Lognormal& d) { return std::exp(d.mu + d.s * normal_quantile(p)); },
                          [p](const Exponential& d) { return -std::log1p(-p) / d.rate; },
                      },
                      kind_);
}

double ClaimDistribution::mean() const noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{
                          [](const Pareto& d) {
                              return d.alpha > 1.0 ? d.alpha * d.xm / (d.alpha - 1.0) : inf;
                          },
                          [](const Weibull& d) { return d.scale * std::tgamma(1.0 + 1.0 / d.k); },
                          [](const Lognormal& d) { return std::exp(d.mu + 0.5 * d.s * d.s); },
                          [](const Exponential& d) { return 1.0 / d.rate; },
                      },
                      kind_);
}

std::string ClaimDistribution::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&os](const Pareto& d) { os << "pareto(" << d.alpha << ", " << d.xm << ")"; },
                   [&os](const Weibull& d) { os << "weibull(" << d.k << ", " << d.scale << ")"; },
                   [&os](const Lognormal& d) { os << "lognormal(" << d.mu << ", " << d.s << ")"; },
                   [&os](const Exponential& d) { os << "exponential(" << d.rate << ")"; },
               },
               kind_);
    return os.str();
}

double mixture_tail(const ClaimDistribution& dist1, const ClaimDistribution& dist2,
                    double lambda1, double lambda2, double x) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
        throw std::invalid_argument("mixture_tail: rates must be > 0");
    const double w1 = lambda1 / (lambda1 + lambda2);
    return w1 * dist1.tail(x) + (1.0 - w1) * dist2.tail(x);
}

double normal_tail(double z) noexcept { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                  6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
        const double den =
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
        return q * num / den;
    }

    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

}  // namespace biruin
