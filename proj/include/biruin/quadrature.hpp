#pragma once

#include <functional>
#include <stdexcept>

namespace biruin {

/// Raised when a numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    bool converged = true;
    long evaluations = 0;
};

/// Adaptive Simpson quadrature on [a, b] with Richardson correction.
///
/// The absolute target is rel_tol * |initial Simpson estimate| and is halved
/// at each bisection. Subintervals that reach max_depth without meeting
/// their share of the tolerance are accepted but flag converged = false.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-10, int max_depth = 40);

}  // namespace biruin
