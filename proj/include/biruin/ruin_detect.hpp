#pragma once

#include <optional>

#include "biruin/random.hpp"
#include "biruin/risk_process.hpp"

namespace biruin {

/// Ruin flags and first-passage times of one path.
///
/// Line ruin (T_1, T_2) and aggregate ruin (T_sum) are first passages below
/// zero; T_max is the first instant at which both lines are negative at once.
/// T_min and T_and are derived from T_1 and T_2.
struct RuinOutcome {
    bool ruin1 = false;
    bool ruin2 = false;
    bool ruin_max = false;
    bool ruin_sum = false;
    std::optional<double> t1;
    std::optional<double> t2;
    std::optional<double> t_max;
    std::optional<double> t_sum;

    bool ruin_min() const noexcept { return ruin1 || ruin2; }
    bool ruin_and() const noexcept { return ruin1 && ruin2; }
    std::optional<double> t_min() const;
    std::optional<double> t_and() const;
};

/// Probability that a Brownian bridge starting at a, ending at b, with total
/// variance v over the interval, goes below zero: exp(-2ab/v), or 1 when
/// either endpoint is <= 0. Throws std::invalid_argument for v <= 0.
double bridge_crossing_prob(double a, double b, double v);

/// Ruin detection on a discounted path.
///
/// Every instant is checked both before and after its jumps. With `bridge`
/// set, each interval on which a line (or the aggregate) is still solvent is
/// also tested for an excursion below zero using bridge_crossing_prob; a
/// detection there is dated at the interval's left end. Simultaneous ruin
/// (T_max) is grid-only. Uniforms are drawn only for intervals with a
/// nonzero crossing probability.
///
/// The aggregate crossing is drawn conditionally on a line crossing in the
/// same interval whenever no line is ruined yet, so aggregate ruin always
/// implies line ruin on the same path.
RuinOutcome detect(const DiscountedPath& path, bool bridge, RandomStream& rng);

}  // namespace biruin
