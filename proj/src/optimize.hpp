#pragma once

// Derivative-free helpers around GSL and Boost.

#include <functional>
#include <vector>

namespace chanres::detail {

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f with the Nelder-Mead simplex (GSL nmsimplex2).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          double step, double sizeTol, int maxIter);

/// Maximizer and maximum of a concave function on [lo, hi] (Brent).
std::pair<double, double> maximize_concave(const std::function<double(double)>& f, double lo, double hi);

}  // namespace chanres::detail
