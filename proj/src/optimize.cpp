#include "optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <boost/math/tools/minima.hpp>
#include <memory>

namespace chanres::detail {

namespace {

struct Callback {
  const std::function<double(const std::vector<double>&)>* f;
  std::vector<double> buf;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* cb = static_cast<Callback*>(params);
  for (std::size_t i = 0; i < cb->buf.size(); ++i) cb->buf[i] = gsl_vector_get(v, i);
  return (*cb->f)(cb->buf);
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          double step, double sizeTol, int maxIter) {
  const std::size_t n = x0.size();
  SimplexResult res;
  if (n == 0) {
    res.f = f(x0);
    res.converged = true;
    return res;
  }
  Callback cb{&f, std::vector<double>(n)};
  gsl_multimin_function fn{&trampoline, n, &cb};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), &gsl_vector_free);
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0[i]);
  gsl_vector_set_all(ss.get(), step);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());
  int it = 0;
  for (; it < maxIter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), sizeTol) == GSL_SUCCESS) {
      res.converged = true;
      break;
    }
  }
  res.iterations = it;
  res.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(s->x, i);
  res.f = s->fval;
  return res;
}

std::pair<double, double> maximize_concave(const std::function<double(double)>& f, double lo, double hi) {
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, 50);
  return {r.first, -r.second};
}

}  // namespace chanres::detail
