#pragma once

// Semidefinite modeling layer and homogeneous self-dual interior-point solver.
//
// Problems are written over complex matrices with real decision variables
// and solved as
//   minimize c'x  s.t.  G x + s = h,  A x = b,  s in K
// with K a product of a nonnegative orthant and Hermitian PSD cones. A
// Hermitian d x d block is stored as d^2 reals (diagonal, then sqrt(2) Re and
// sqrt(2) Im of the strict lower triangle) so that dot products match Re Tr.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "chanres/core.hpp"

namespace chanres::conic {

enum class Status { Optimal, Infeasible, Unbounded, Inaccurate };

const char* to_string(Status status) noexcept;

struct Settings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  /// Looser threshold accepted when the solver stalls before reaching the target.
  double accepted = 1e-7;
  int maxIterations = 100;
};

/// Process-wide default settings (thread-safe copy semantics).
Settings default_settings();
void set_default_settings(const Settings& settings);

using SparseC = Eigen::SparseMatrix<Complex>;
using SparseR = Eigen::SparseVector<double>;

class ScalarExpr {
 public:
  ScalarExpr(double constant = 0.0) : constant_(constant) {}  // NOLINT: implicit from double
  ScalarExpr(double constant, SparseR coeffs) : constant_(constant), coeffs_(std::move(coeffs)) {}

  double constant() const noexcept { return constant_; }
  const SparseR& coeffs() const noexcept { return coeffs_; }
  double value(const RVector& x) const;

  ScalarExpr operator+(const ScalarExpr& other) const;
  ScalarExpr operator-(const ScalarExpr& other) const;
  ScalarExpr operator-() const;
  ScalarExpr operator*(double factor) const;
  friend ScalarExpr operator*(double factor, const ScalarExpr& e) { return e * factor; }

 private:
  double constant_ = 0.0;
  SparseR coeffs_;
};

/// Affine complex matrix expression  constant + sum_j x_j M_j  with x real.
class MatExpr {
 public:
  MatExpr() = default;
  explicit MatExpr(CMatrix constant);
  MatExpr(int rows, int cols, CMatrix constant, SparseC coeffs);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const CMatrix& constant() const noexcept { return constant_; }
  /// Column j holds M_j vectorized row-major (index i * cols + k).
  const SparseC& coeffs() const noexcept { return coeffs_; }

  CMatrix value(const RVector& x) const;

  MatExpr operator+(const MatExpr& other) const;
  MatExpr operator-(const MatExpr& other) const;
  MatExpr operator-() const;
  MatExpr operator*(double factor) const;
  friend MatExpr operator*(double factor, const MatExpr& e) { return e * factor; }
  friend MatExpr operator*(const CMatrix& left, const MatExpr& e);
  MatExpr operator*(const CMatrix& right) const;

  MatExpr adjoint() const;
  /// Real part of the trace.
  ScalarExpr trace() const;
  /// Re Tr[W E].
  ScalarExpr inner(const CMatrix& weight) const;
  /// One entry's real part.
  ScalarExpr real_entry(int i, int j) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  CMatrix constant_;
  SparseC coeffs_;
};

/// Complex-linear map between matrix spaces, acting on row-major vectorizations.
class LinearMap {
 public:
  LinearMap(int inRows, int inCols, int outRows, int outCols, SparseC matrix);

  template <typename F>
  static LinearMap from_function(int inRows, int inCols, F&& f);

  static LinearMap partial_trace(std::vector<int> dims, std::vector<int> traced);
  static LinearMap partial_transpose(std::vector<int> dims, std::vector<int> which);
  /// X -> left (x) X (x) right.
  static LinearMap kron(const CMatrix& left, int inRows, int inCols, const CMatrix& right);

  MatExpr operator()(const MatExpr& e) const;
  CMatrix operator()(const CMatrix& m) const;

 private:
  int inRows_, inCols_, outRows_, outCols_;
  SparseC matrix_;
};

template <typename F>
LinearMap LinearMap::from_function(int inRows, int inCols, F&& f) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  int outRows = -1, outCols = -1;
  for (int i = 0; i < inRows; ++i) {
    for (int j = 0; j < inCols; ++j) {
      CMatrix basis = CMatrix::Zero(inRows, inCols);
      basis(i, j) = 1.0;
      const CMatrix image = f(basis);
      outRows = static_cast<int>(image.rows());
      outCols = static_cast<int>(image.cols());
      for (int r = 0; r < outRows; ++r)
        for (int c = 0; c < outCols; ++c)
          if (image(r, c) != Complex(0.0))
            triplets.emplace_back(r * outCols + c, i * inCols + j, image(r, c));
    }
  }
  SparseC m(outRows * outCols, inRows * inCols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return LinearMap(inRows, inCols, outRows, outCols, std::move(m));
}

/// s * M for a scalar expression and a constant matrix.
MatExpr scalar_times(const ScalarExpr& s, const CMatrix& m);

/// Places blocks into a larger matrix expression; unlisted blocks are zero.
MatExpr block_matrix(const std::vector<std::vector<MatExpr>>& blocks);

enum class BlockCone { PsdHermitian, FreeHermitian, FreeComplex, NonnegScalar, FreeScalar };

struct VariableBlock {
  std::string name;
  int rows;
  int cols;
  BlockCone cone;
  int offset;
  int size;
};

using ConstraintId = int;

struct Solution {
  Status status = Status::Inaccurate;
  double objective = 0.0;      // primal objective in the caller's sense (max or min)
  double dualObjective = 0.0;  // same sense
  double gap = 0.0;
  double primalResidual = 0.0;
  double dualResidual = 0.0;
  int iterations = 0;
  std::string message;
  RVector x;
  RVector eqDual;    // per equality row
  RVector coneDual;  // per cone coordinate
  /// Farkas certificate for Infeasible (ray in dual space), empty otherwise.
  std::optional<RVector> certificate;

  std::vector<std::pair<int, int>> eqRows;    // constraint id -> [first, count)
  std::vector<std::pair<int, int>> coneRows;  // constraint id -> [first, count)
  std::vector<int> coneDims;                  // constraint id -> Hermitian dim (0 for scalar)

  CMatrix value(const MatExpr& e) const { return e.value(x); }
  double value(const ScalarExpr& e) const { return e.value(x); }
  /// Dual matrix Z of a PSD constraint, paired through Re Tr[H Z].
  CMatrix psd_dual(ConstraintId id) const;
  double scalar_dual(ConstraintId id) const;
};

class Problem {
 public:
  MatExpr hermitian(const std::string& name, int dim, bool psd = true);
  MatExpr complex_matrix(const std::string& name, int rows, int cols);
  ScalarExpr scalar(const std::string& name, bool nonneg = false);

  ConstraintId equal(const MatExpr& lhs, const MatExpr& rhs);
  ConstraintId equal(const ScalarExpr& lhs, const ScalarExpr& rhs);
  /// expr >= 0 in the Loewner order; expr must be Hermitian.
  ConstraintId psd(const MatExpr& expr);
  ConstraintId nonneg(const ScalarExpr& expr);

  void minimize(const ScalarExpr& objective);
  void maximize(const ScalarExpr& objective);

  int num_vars() const noexcept { return numVars_; }
  const std::vector<VariableBlock>& blocks() const noexcept { return blocks_; }

  Solution solve() const { return solve(default_settings()); }
  Solution solve(const Settings& settings) const;

 private:
  struct EqConstraint {
    MatExpr expr;  // == 0
  };
  struct ConeConstraint {
    MatExpr expr;  // >= 0
    bool scalar;
  };
  struct Entry {
    bool isEquality;
    int index;
  };

  int numVars_ = 0;
  std::vector<VariableBlock> blocks_;
  std::vector<EqConstraint> equalities_;
  std::vector<ConeConstraint> cones_;
  std::vector<Entry> order_;
  ScalarExpr objective_;
  bool maximize_ = false;
};

}  // namespace chanres::conic
