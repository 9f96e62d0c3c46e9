#pragma once

#include <string>
#include <vector>

#include "biruin/heavy_tails.hpp"
#include "biruin/risk_process.hpp"

namespace biruin {

/// Which closed form produced an asymptotic value.
///
/// T31..T34 cover (common shock, r = 0), (common shock, r > 0),
/// (independent arrivals, r = 0), (independent arrivals, r > 0).
/// L43/L44 are the one-line finite-horizon results for r = 0 / r > 0.
enum class CaseId {
    T31a_max, T31a_min, T31b_sum,
    T32a_max, T32a_min, T32b_sum,
    T33a_max, T33a_min, T33b_sum,
    T34a_max, T34a_min, T34b_sum,
    L43_uni, L44_uni,
    and_upper,
};

const char* to_string(CaseId id) noexcept;

struct AsymptoticResult {
    double value = 0.0;
    CaseId case_id = CaseId::L43_uni;
    double u1 = 0.0;
    double u2 = 0.0;
    ModelConfig model;
    // Violated hypotheses and values above 1; informational only.
    std::vector<std::string> warnings;

    bool exceeds_one() const noexcept { return value > 1.0; }
};

/// I(u) = int_u^{u exp(rT)} Fbar(y)/y dy.
///
/// Pareto with u >= xm uses the closed form; everything else goes through
/// tail_integral_quadrature. Throws std::invalid_argument for r <= 0 or
/// u <= 0 and NumericalError if the quadrature does not converge.
double tail_integral(const ClaimDistribution& dist, double u, double r, double T);

/// Same quantity, always by quadrature: rT * int_0^1 Fbar(u exp(rTz)) dz.
double tail_integral_quadrature(const ClaimDistribution& dist, double u, double r, double T);

/// One-line finite-horizon ruin asymptotics: lambda T Fbar(u) when r = 0,
/// (lambda / r) I(u) otherwise.
AsymptoticResult psi_uni_asym(double lambda, const ClaimDistribution& dist, double u, double r,
                              double T);

/// Simultaneous ruin of both lines.
AsymptoticResult psi_max_asym(const ModelConfig& model, double u1, double u2);
/// Ruin of at least one line.
AsymptoticResult psi_min_asym(const ModelConfig& model, double u1, double u2);
/// Ruin of the aggregate, evaluated at s = u1 + u2. The common-shock r > 0
/// case assumes proportional tails and uses (lambda / r)(I_1(s) + I_2(s)).
AsymptoticResult psi_sum_asym(const ModelConfig& model, double u1, double u2);

/// Upper order bound for ruin of both lines (not necessarily together).
/// Only a bound is known, so this returns the psi_max_asym value relabelled.
AsymptoticResult psi_and_upper(const ModelConfig& model, double u1, double u2);

}  // namespace biruin
