#include "biruin/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "biruin/quadrature.hpp"

namespace biruin {

namespace {

constexpr double kRelTol = 1e-10;
constexpr int kMaxDepth = 40;

void check_rate(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("tail_integral: r must be > 0 (use the r = 0 formulas)");
}

void check_capital(double u) {
    if (!(u > 0.0) || !std::isfinite(u)) throw std::invalid_argument("tail_integral: u must be > 0");
}

void add_hypothesis_warnings(AsymptoticResult& res, const ModelConfig& m, bool aggregate) {
    if (!(m.rho > -1.0 && m.rho <= 0.0))
        res.warnings.push_back("rho outside (-1, 0]: hypothesis of the asymptotics not met");
    const bool heavy1 = m.dist1.tail_class() != TailClass::light;
    const bool heavy2 = m.dist2.tail_class() != TailClass::light;
    if (aggregate) {
        if (!heavy1 && !heavy2) res.warnings.push_back("no subexponential claim law: aggregate hypothesis not met");
    } else {
        if (!heavy1) res.warnings.push_back("dist1 is not subexponential");
        if (!heavy2) res.warnings.push_back("dist2 is not subexponential");
    }
}

AsymptoticResult finish(double value, CaseId id, const ModelConfig& m, double u1, double u2,
                        bool aggregate) {
    AsymptoticResult res;
    res.value = value;
    res.case_id = id;
    res.u1 = u1;
    res.u2 = u2;
    res.model = m;
    add_hypothesis_warnings(res, m, aggregate);
    if (res.exceeds_one()) res.warnings.push_back("asymptotic value exceeds 1: u too small for the regime");
    return res;
}

}  // namespace

const char* to_string(CaseId id) noexcept {
    switch (id) {
        case CaseId::T31a_max: return "T31a_max";
        case CaseId::T31a_min: return "T31a_min";
        case CaseId::T31b_sum: return "T31b_sum";
        case CaseId::T32a_max: return "T32a_max";
        case CaseId::T32a_min: return "T32a_min";
        case CaseId::T32b_sum: return "T32b_sum";
        case CaseId::T33a_max: return "T33a_max";
        case CaseId::T33a_min: return "T33a_min";
        case CaseId::T33b_sum: return "T33b_sum";
        case CaseId::T34a_max: return "T34a_max";
        case CaseId::T34a_min: return "T34a_min";
        case CaseId::T34b_sum: return "T34b_sum";
        case CaseId::L43_uni: return "L43_uni";
        case CaseId::L44_uni: return "L44_uni";
        case CaseId::and_upper: return "and_upper";
    }
    return "unknown";
}

double tail_integral_quadrature(const ClaimDistribution& dist, double u, double r, double T) {
    check_rate(r);
    check_capital(u);
    if (T == 0.0) return 0.0;
    if (!(T > 0.0)) throw std::invalid_argument("tail_integral: T must be >= 0");
    const double rT = r * T;
    const auto integrand = [&](double z) { return dist.tail(u * std::exp(rT * z)); };
    const QuadratureResult q = adaptive_simpson(integrand, 0.0, 1.0, kRelTol, kMaxDepth);
    if (!q.converged) throw NumericalError("tail_integral: adaptive Simpson did not converge");
    return rT * q.value;
}

double tail_integral(const ClaimDistribution& dist, double u, double r, double T) {
    check_rate(r);
    check_capital(u);
    if (const auto* p = std::get_if<Pareto>(&dist.kind()); p && u >= p->xm && T >= 0.0) {
        // (xm^a / a) (u^-a - (u e^{rT})^-a) = ((xm/u)^a / a) (1 - e^{-a r T})
        return std::pow(p->xm / u, p->alpha) / p->alpha * -std::expm1(-p->alpha * r * T);
    }
    return tail_integral_quadrature(dist, u, r, T);
}

AsymptoticResult psi_uni_asym(double lambda, const ClaimDistribution& dist, double u, double r,
                              double T) {
    if (!(u > 0.0)) throw std::invalid_argument("psi_uni_asym: u must be > 0");
    if (!(r >= 0.0)) throw std::invalid_argument("psi_uni_asym: r must be >= 0");
    AsymptoticResult res;
    res.u1 = u;
    res.u2 = u;
    if (r == 0.0) {
        res.value = lambda * T * dist.tail(u);
        res.case_id = CaseId::L43_uni;
    } else {
        res.value = lambda / r * tail_integral(dist, u, r, T);
        res.case_id = CaseId::L44_uni;
    }
    res.model.r = r;
    res.model.T = T;
    res.model.lambda1 = lambda;
    res.model.dist1 = dist;
    if (dist.tail_class() == TailClass::light) res.warnings.push_back("claim law is not subexponential");
    if (res.exceeds_one()) res.warnings.push_back("asymptotic value exceeds 1: u too small for the regime");
    return res;
}

AsymptoticResult psi_max_asym(const ModelConfig& m, double u1, double u2) {
    const double T = m.T;
    if (m.common_shock) {
        const double lambda = m.lambda1;
        if (m.r == 0.0) {
            const double v = lambda * T * (1.0 + lambda * T) * m.dist1.tail(u1) * m.dist2.tail(u2);
            return finish(v, CaseId::T31a_max, m, u1, u2, false);
        }
        const double v = lambda * (lambda + 1.0 / T) / (m.r * m.r) * tail_integral(m.dist1, u1, m.r, T) *
                         tail_integral(m.dist2, u2, m.r, T);
        return finish(v, CaseId::T32a_max, m, u1, u2, false);
    }
    if (m.r == 0.0) {
        const double v = m.lambda1 * m.lambda2 * T * T * m.dist1.tail(u1) * m.dist2.tail(u2);
        return finish(v, CaseId::T33a_max, m, u1, u2, false);
    }
    const double v = m.lambda1 * m.lambda2 / (m.r * m.r) * tail_integral(m.dist1, u1, m.r, T) *
                     tail_integral(m.dist2, u2, m.r, T);
    return finish(v, CaseId::T34a_max, m, u1, u2, false);
}

AsymptoticResult psi_min_asym(const ModelConfig& m, double u1, double u2) {
    const double T = m.T;
    if (m.common_shock) {
        const double lambda = m.lambda1;
        if (m.r == 0.0) {
            const double v = lambda * T * (m.dist1.tail(u1) + m.dist2.tail(u2));
            return finish(v, CaseId::T31a_min, m, u1, u2, false);
        }
        const double v =
            lambda / m.r * (tail_integral(m.dist1, u1, m.r, T) + tail_integral(m.dist2, u2, m.r, T));
        return finish(v, CaseId::T32a_min, m, u1, u2, false);
    }
    if (m.r == 0.0) {
        const double v = T * (m.lambda1 * m.dist1.tail(u1) + m.lambda2 * m.dist2.tail(u2));
        return finish(v, CaseId::T33a_min, m, u1, u2, false);
    }
    const double v = (m.lambda1 * tail_integral(m.dist1, u1, m.r, T) +
                      m.lambda2 * tail_integral(m.dist2, u2, m.r, T)) /
                     m.r;
    return finish(v, CaseId::T34a_min, m, u1, u2, false);
}

AsymptoticResult psi_sum_asym(const ModelConfig& m, double u1, double u2) {
    const double s = u1 + u2;
    if (!(s > 0.0)) throw std::invalid_argument("psi_sum_asym: u1 + u2 must be > 0");
    const double T = m.T;
    if (m.common_shock) {
        const double lambda = m.lambda1;
        if (m.r == 0.0) {
            const double v = lambda * T * (m.dist1.tail(s) + m.dist2.tail(s));
            return finish(v, CaseId::T31b_sum, m, u1, u2, true);
        }
        const double v =
            lambda / m.r * (tail_integral(m.dist1, s, m.r, T) + tail_integral(m.dist2, s, m.r, T));
        return finish(v, CaseId::T32b_sum, m, u1, u2, true);
    }
    if (m.r == 0.0) {
        const double v = T * (m.lambda1 + m.lambda2) * mixture_tail(m.dist1, m.dist2, m.lambda1, m.lambda2, s);
        return finish(v, CaseId::T33b_sum, m, u1, u2, true);
    }
    const double v =
        (m.lambda1 * tail_integral(m.dist1, s, m.r, T) + m.lambda2 * tail_integral(m.dist2, s, m.r, T)) / m.r;
    return finish(v, CaseId::T34b_sum, m, u1, u2, true);
}

AsymptoticResult psi_and_upper(const ModelConfig& m, double u1, double u2) {
    AsymptoticResult res = psi_max_asym(m, u1, u2);
    res.case_id = CaseId::and_upper;
    return res;
}

}  // namespace biruin
