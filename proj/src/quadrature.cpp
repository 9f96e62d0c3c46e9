#include "biruin/quadrature.hpp"

#include <cmath>
#include <limits>

namespace biruin {

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    int max_depth;
    bool converged = true;
    long evaluations = 0;

    double eval(double x) {
        ++evaluations;
        return f(x);
    }

    double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                  int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        if (depth >= max_depth) {
            converged = false;
            return left + right + delta / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, int max_depth) {
    QuadratureResult result;
    if (a == b) return result;

    SimpsonState state{f, max_depth};
    const double fa = state.eval(a);
    const double fb = state.eval(b);
    const double fm = state.eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double tol = rel_tol * std::abs(whole);
    if (tol == 0.0) tol = std::numeric_limits<double>::min();

    result.value = state.refine(a, b, fa, fm, fb, whole, tol, 0);
    result.converged = state.converged;
    result.evaluations = state.evaluations;
    return result;
}

}  // namespace biruin
