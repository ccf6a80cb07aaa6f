#pragma once

// Real standard-form cone program solved by a homogeneous self-dual
// primal-dual interior-point method with Nesterov-Todd scaling.

#include <string>
#include <vector>

#include "chanres/conic.hpp"

namespace chanres::conic::detail {

struct ConeLayout {
  int lp = 0;
  std::vector<int> psd;  // Hermitian block orders

  int total() const {
    int t = lp;
    for (int m : psd) t += m * m;
    return t;
  }
  int degree() const {
    int d = lp;
    for (int m : psd) d += m;
    return d;
  }
};

struct StandardForm {
  RVector c;
  RMatrix G;
  RVector h;
  RMatrix A;
  RVector b;
  ConeLayout cones;
};

struct StandardResult {
  Status status = Status::Inaccurate;
  RVector x, y, z, s;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  int iterations = 0;
  std::string message;
};

/// Isometric packing of Hermitian matrices (real length m^2).
void pack_hermitian(const CMatrix& x, double* out);
CMatrix unpack_hermitian(const double* in, int m);

StandardResult solve_standard(const StandardForm& problem, const Settings& settings);

}  // namespace chanres::conic::detail
