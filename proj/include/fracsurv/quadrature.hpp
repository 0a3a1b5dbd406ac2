#pragma once

#include <functional>

namespace fracsurv {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b], bisecting the
/// panel with the largest error estimate until the summed estimate falls
/// below `abs_tol` or `max_panels` is reached. The integrand is only
/// evaluated at interior nodes, so integrable endpoint singularities are
/// allowed (convergence there is slow).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol = 1e-10,
                                    int max_panels = 2000);

}  // namespace fracsurv
