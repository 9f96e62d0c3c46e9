#include "biruin/ruin_detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biruin {

std::optional<double> RuinOutcome::t_min() const {
    if (t1 && t2) return std::min(*t1, *t2);
    return t1 ? t1 : t2;
}

std::optional<double> RuinOutcome::t_and() const {
    if (t1 && t2) return std::max(*t1, *t2);
    return std::nullopt;
}

double bridge_crossing_prob(double a, double b, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("bridge_crossing_prob: variance must be > 0");
    if (a <= 0.0 || b <= 0.0) return 1.0;
    const double ab2 = 2.0 * a * b;
    // exp underflows to exactly zero past 746.
    if (ab2 > 746.0 * v) return 0.0;
    return std::exp(-ab2 / v);
}

RuinOutcome detect(const DiscountedPath& path, bool bridge, RandomStream& rng) {
    RuinOutcome out;
    const std::size_t n = path.size();
    const double var1 = path.sigma1 * path.sigma1;
    const double var2 = path.sigma2 * path.sigma2;
    const double var_sum = std::max(0.0, var1 + var2 + 2.0 * path.rho * path.sigma1 * path.sigma2);

    for (std::size_t k = 1; k < n; ++k) {
        if (out.ruin1 && out.ruin2 && out.ruin_sum && out.ruin_max) break;

        if (bridge) {
            const double left_t = path.times[k - 1];
            const double a1 = path.v1[k - 1], a2 = path.v2[k - 1];
            const double b1 = path.v1_pre[k], b2 = path.v2_pre[k];
            const double v = path.step_var[k];
            const bool min_before = out.ruin_min();

            const double p1 = (!out.ruin1 && var1 > 0.0) ? bridge_crossing_prob(a1, b1, var1 * v) : 0.0;
            const double p2 = (!out.ruin2 && var2 > 0.0) ? bridge_crossing_prob(a2, b2, var2 * v) : 0.0;
            const double ps =
                (!out.ruin_sum && var_sum > 0.0) ? bridge_crossing_prob(a1 + a2, b1 + b2, var_sum * v) : 0.0;

            const bool hit1 = p1 > 0.0 && rng.uniform() < p1;
            const bool hit2 = p2 > 0.0 && rng.uniform() < p2;
            // V1 + V2 can only cross 0 where V1 or V2 does, so while no line
            // is ruined the sum draw is conditioned on a line hit in this
            // interval. Keeps sum ruin inside min ruin path by path.
            bool hit_sum = false;
            if (ps > 0.0) {
                if (min_before) {
                    hit_sum = rng.uniform() < ps;
                } else if (hit1 || hit2) {
                    const double either = p1 + p2 - p1 * p2;
                    hit_sum = rng.uniform() < std::min(1.0, ps / either);
                }
            }
            if (hit1) {
                out.ruin1 = true;
                out.t1 = left_t;
            }
            if (hit2) {
                out.ruin2 = true;
                out.t2 = left_t;
            }
            if (hit_sum) {
                out.ruin_sum = true;
                out.t_sum = left_t;
            }
        }

        const double t = path.times[k];
        const double pre1 = path.v1_pre[k], pre2 = path.v2_pre[k];
        const double post1 = path.v1[k], post2 = path.v2[k];
        if (!out.ruin1 && (pre1 < 0.0 || post1 < 0.0)) {
            out.ruin1 = true;
            out.t1 = t;
        }
        if (!out.ruin2 && (pre2 < 0.0 || post2 < 0.0)) {
            out.ruin2 = true;
            out.t2 = t;
        }
        if (!out.ruin_sum && (pre1 + pre2 < 0.0 || post1 + post2 < 0.0)) {
            out.ruin_sum = true;
            out.t_sum = t;
        }
        if (!out.ruin_max && ((pre1 < 0.0 && pre2 < 0.0) || (post1 < 0.0 && post2 < 0.0))) {
            out.ruin_max = true;
            out.t_max = t;
        }
    }
    return out;
}

}  // namespace biruin
