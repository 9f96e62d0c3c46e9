#pragma once

#include <string>
#include <variant>

#include "biruin/random.hpp"

namespace biruin {

// Declarative tail-class label. Nothing in the library tests membership
// numerically; the label only drives hypothesis warnings.
enum class TailClass { subexponential, erv, light };

const char* to_string(TailClass c) noexcept;

struct Pareto {
    double alpha;  // shape
    double xm;     // scale, also the support minimum
    bool operator==(const Pareto&) const = default;
};

// Weibull with shape k in (0,1): stretched-exponential, subexponential tail.
struct Weibull {
    double k;
    double scale;
    bool operator==(const Weibull&) const = default;
};

struct Lognormal {
    double mu;
    double s;
    bool operator==(const Lognormal&) const = default;
};

// Light-tailed contrast case.
struct Exponential {
    double rate;
    bool operator==(const Exponential&) const = default;
};

/// Parametric claim-size law. Immutable after construction.
class ClaimDistribution {
public:
    using Kind = std::variant<Pareto, Weibull, Lognormal, Exponential>;

    // Throws std::invalid_argument on out-of-range parameters.
    explicit ClaimDistribution(Kind kind);

    static ClaimDistribution pareto(double alpha, double xm) { return ClaimDistribution{Pareto{alpha, xm}}; }
    static ClaimDistribution weibull(double k, double scale) { return ClaimDistribution{Weibull{k, scale}}; }
    static ClaimDistribution lognormal(double mu, double s) { return ClaimDistribution{Lognormal{mu, s}}; }
    static ClaimDistribution exponential(double rate) { return ClaimDistribution{Exponential{rate}}; }

    const Kind& kind() const noexcept { return kind_; }
    TailClass tail_class() const noexcept;

    /// Survival function 1 - F(x). Equals 1 below the support minimum.
    double tail(double x) const noexcept;
    double cdf(double x) const noexcept { return 1.0 - tail(x); }

    /// Inverse CDF: x with F(x) = p. Throws std::domain_error unless 0 < p < 1.
    double quantile(double p) const;

    /// One inverse-CDF draw; consumes exactly one uniform from `rng`.
    double sample(RandomStream& rng) const { return quantile(rng.uniform()); }

    /// E[X]; +infinity when the mean does not exist (Pareto alpha <= 1).
    double mean() const noexcept;

    /// Config-file spelling, e.g. "pareto(1.5, 1)".
    std::string describe() const;

    friend bool operator==(const ClaimDistribution&, const ClaimDistribution&) = default;

private:
    Kind kind_;
};

/// Tail of xi*X1 + (1-xi)*X2 with P(xi = 1) = lambda1 / (lambda1 + lambda2):
/// the claim law seen by the aggregate of two independent Poisson streams.
/// Throws std::invalid_argument for nonpositive rates.
double mixture_tail(const ClaimDistribution& dist1, const ClaimDistribution& dist2,
                    double lambda1, double lambda2, double x);

/// Standard normal quantile, Wichura's AS 241 (PPND16). Relative error is
/// below 1e-15 over (0, 1). Throws std::domain_error unless 0 < p < 1.
double normal_quantile(double p);

/// Standard normal upper tail 1 - Phi(z), accurate in the far tail.
double normal_tail(double z) noexcept;

}  // namespace biruin
