#include "chanres/conic.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "conic_ipm.hpp"

namespace chanres::conic {

namespace {

std::mutex& settings_mutex() {
  static std::mutex m;
  return m;
}
Settings& settings_store() {
  static Settings s;
  return s;
}

SparseC widen(const SparseC& m, Eigen::Index cols) {
  if (m.cols() >= cols) return m;
  SparseC out = m;
  out.conservativeResize(m.rows(), cols);
  return out;
}

SparseR widen(const SparseR& v, Eigen::Index size) {
  if (v.size() >= size) return v;
  SparseR out = v;
  out.conservativeResize(size);
  return out;
}

// Row-major vec(L E R) = (L (x) R^T) vec(E).
SparseC kron_sparse(const CMatrix& a, const CMatrix& b) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == Complex(0.0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          if (b(k, l) != Complex(0.0))
            t.emplace_back(i * b.rows() + k, j * b.cols() + l, a(i, j) * b(k, l));
    }
  SparseC m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

CVector vec_rowmajor(const CMatrix& m) {
  CVector v(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

CMatrix unvec_rowmajor(const CVector& v, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

MatExpr scalar_to_mat(const ScalarExpr& s) {
  SparseC c(1, s.coeffs().size());
  std::vector<Eigen::Triplet<Complex>> t;
  for (SparseR::InnerIterator it(s.coeffs()); it; ++it) t.emplace_back(0, static_cast<int>(it.index()), it.value());
  c.setFromTriplets(t.begin(), t.end());
  CMatrix k(1, 1);
  k(0, 0) = s.constant();
  return MatExpr(1, 1, k, c);
}

bool is_hermitian_expr(const MatExpr& e) {
  if (e.rows() != e.cols()) return false;
  if (!is_hermitian(e.constant(), 1e-12)) return false;
  const SparseC diff = e.coeffs() - e.adjoint().coeffs();
  return diff.norm() <= 1e-12 * (1.0 + e.coeffs().norm());
}

// Rows of the packed Hermitian representation of a Hermitian expression:
// returns (coefficient rows, packed constant).
void pack_expr(const MatExpr& e, int n, RMatrix& rows, RVector& constant) {
  const int d = e.rows();
  rows = RMatrix::Zero(d * d, n);
  constant.resize(d * d);
  detail::pack_hermitian(e.constant(), constant.data());
  // offset of the pair (a > b) in the packed layout
  std::vector<int> pairIndex(static_cast<std::size_t>(d) * d, -1);
  int k = d;
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      pairIndex[static_cast<std::size_t>(i) * d + j] = k;
      k += 2;
    }
  const double h = std::sqrt(2.0) / 2.0;
  const SparseC& c = e.coeffs();
  for (int col = 0; col < c.outerSize(); ++col) {
    for (SparseC::InnerIterator it(c, col); it; ++it) {
      const int a = static_cast<int>(it.row()) / d;
      const int b = static_cast<int>(it.row()) % d;
      const Complex v = it.value();
      if (a == b) {
        rows(a, col) += v.real();
      } else if (a > b) {
        const int p = pairIndex[static_cast<std::size_t>(a) * d + b];
        rows(p, col) += h * v.real();
        rows(p + 1, col) += h * v.imag();
      } else {
        const int p = pairIndex[static_cast<std::size_t>(b) * d + a];
        rows(p, col) += h * v.real();
        rows(p + 1, col) -= h * v.imag();
      }
    }
  }
}

void split_expr(const MatExpr& e, int n, RMatrix& rows, RVector& constant) {
  const int m = e.rows() * e.cols();
  rows = RMatrix::Zero(2 * m, n);
  constant.resize(2 * m);
  const CVector k = vec_rowmajor(e.constant());
  for (int i = 0; i < m; ++i) {
    constant(i) = k(i).real();
    constant(m + i) = k(i).imag();
  }
  const SparseC& c = e.coeffs();
  for (int col = 0; col < c.outerSize(); ++col)
    for (SparseC::InnerIterator it(c, col); it; ++it) {
      rows(static_cast<int>(it.row()), col) += it.value().real();
      rows(m + static_cast<int>(it.row()), col) += it.value().imag();
    }
}

}  // namespace

const char* to_string(Status status) noexcept {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::Inaccurate: return "inaccurate";
  }
  return "unknown";
}

Settings default_settings() {
  std::lock_guard<std::mutex> lock(settings_mutex());
  return settings_store();
}

void set_default_settings(const Settings& settings) {
  std::lock_guard<std::mutex> lock(settings_mutex());
  settings_store() = settings;
}

// ---------------------------------------------------------------------------
// ScalarExpr

double ScalarExpr::value(const RVector& x) const {
  double v = constant_;
  for (SparseR::InnerIterator it(coeffs_); it; ++it) v += it.value() * x(it.index());
  return v;
}

ScalarExpr ScalarExpr::operator+(const ScalarExpr& o) const {
  const auto n = std::max(coeffs_.size(), o.coeffs_.size());
  return ScalarExpr(constant_ + o.constant_, SparseR(widen(coeffs_, n) + widen(o.coeffs_, n)));
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& o) const { return *this + (-o); }
ScalarExpr ScalarExpr::operator-() const { return *this * -1.0; }
ScalarExpr ScalarExpr::operator*(double f) const { return ScalarExpr(constant_ * f, SparseR(coeffs_ * f)); }

// ---------------------------------------------------------------------------
// MatExpr

MatExpr::MatExpr(CMatrix constant)
    : rows_(static_cast<int>(constant.rows())),
      cols_(static_cast<int>(constant.cols())),
      constant_(std::move(constant)),
      coeffs_(rows_ * cols_, 0) {}

MatExpr::MatExpr(int rows, int cols, CMatrix constant, SparseC coeffs)
    : rows_(rows), cols_(cols), constant_(std::move(constant)), coeffs_(std::move(coeffs)) {
  if (constant_.rows() != rows || constant_.cols() != cols || coeffs_.rows() != rows * cols)
    throw Error(ErrorCode::ShapeMismatch, "matrix expression shape mismatch");
}

CMatrix MatExpr::value(const RVector& x) const {
  CVector v = vec_rowmajor(constant_);
  if (coeffs_.cols() > 0) v += coeffs_ * x.head(coeffs_.cols()).cast<Complex>();
  return unvec_rowmajor(v, rows_, cols_);
}

MatExpr MatExpr::operator+(const MatExpr& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::ShapeMismatch, "sum of mismatched shapes");
  const auto n = std::max(coeffs_.cols(), o.coeffs_.cols());
  return MatExpr(rows_, cols_, constant_ + o.constant_, SparseC(widen(coeffs_, n) + widen(o.coeffs_, n)));
}

MatExpr MatExpr::operator-(const MatExpr& o) const { return *this + (-o); }
MatExpr MatExpr::operator-() const { return *this * -1.0; }

MatExpr MatExpr::operator*(double f) const {
  return MatExpr(rows_, cols_, constant_ * f, SparseC(coeffs_ * Complex(f)));
}

MatExpr operator*(const CMatrix& left, const MatExpr& e) {
  if (left.cols() != e.rows_) throw Error(ErrorCode::ShapeMismatch, "left product shape mismatch");
  const SparseC map = kron_sparse(left, CMatrix::Identity(e.cols_, e.cols_));
  return MatExpr(static_cast<int>(left.rows()), e.cols_, left * e.constant_, SparseC(map * e.coeffs_));
}

MatExpr MatExpr::operator*(const CMatrix& right) const {
  if (right.rows() != cols_) throw Error(ErrorCode::ShapeMismatch, "right product shape mismatch");
  const SparseC map = kron_sparse(CMatrix::Identity(rows_, rows_), right.transpose());
  return MatExpr(rows_, static_cast<int>(right.cols()), constant_ * right, SparseC(map * coeffs_));
}

MatExpr MatExpr::adjoint() const {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int col = 0; col < coeffs_.outerSize(); ++col)
    for (SparseC::InnerIterator it(coeffs_, col); it; ++it) {
      const int a = static_cast<int>(it.row()) / cols_;
      const int b = static_cast<int>(it.row()) % cols_;
      t.emplace_back(b * rows_ + a, col, std::conj(it.value()));
    }
  SparseC c(rows_ * cols_, coeffs_.cols());
  c.setFromTriplets(t.begin(), t.end());
  return MatExpr(cols_, rows_, constant_.adjoint(), std::move(c));
}

ScalarExpr MatExpr::trace() const {
  if (rows_ != cols_) throw Error(ErrorCode::ShapeMismatch, "trace of a non-square expression");
  return inner(CMatrix::Identity(rows_, rows_));
}

ScalarExpr MatExpr::inner(const CMatrix& w) const {
  if (w.rows() != cols_ || w.cols() != rows_) throw Error(ErrorCode::ShapeMismatch, "inner product shape mismatch");
  SparseR v(coeffs_.cols());
  for (int col = 0; col < coeffs_.outerSize(); ++col) {
    double acc = 0.0;
    for (SparseC::InnerIterator it(coeffs_, col); it; ++it) {
      const int a = static_cast<int>(it.row()) / cols_;
      const int b = static_cast<int>(it.row()) % cols_;
      acc += (w(b, a) * it.value()).real();
    }
    if (acc != 0.0) v.insert(col) = acc;
  }
  return ScalarExpr((w * constant_).trace().real(), std::move(v));
}

ScalarExpr MatExpr::real_entry(int i, int j) const {
  CMatrix w = CMatrix::Zero(cols_, rows_);
  w(j, i) = 1.0;
  return inner(w);
}

// ---------------------------------------------------------------------------
// LinearMap

LinearMap::LinearMap(int inRows, int inCols, int outRows, int outCols, SparseC matrix)
    : inRows_(inRows), inCols_(inCols), outRows_(outRows), outCols_(outCols), matrix_(std::move(matrix)) {}

LinearMap LinearMap::partial_trace(std::vector<int> dims, std::vector<int> traced) {
  const int d = product(dims);
  return from_function(d, d, [&](const CMatrix& x) { return chanres::partial_trace(x, dims, traced); });
}

LinearMap LinearMap::partial_transpose(std::vector<int> dims, std::vector<int> which) {
  const int d = product(dims);
  return from_function(d, d, [&](const CMatrix& x) { return chanres::partial_transpose(x, dims, which); });
}

LinearMap LinearMap::kron(const CMatrix& left, int inRows, int inCols, const CMatrix& right) {
  return from_function(inRows, inCols,
                       [&](const CMatrix& x) { return chanres::kron(left, chanres::kron(x, right)); });
}

MatExpr LinearMap::operator()(const MatExpr& e) const {
  if (e.rows() != inRows_ || e.cols() != inCols_) throw Error(ErrorCode::ShapeMismatch, "linear map input shape");
  return MatExpr(outRows_, outCols_, (*this)(e.constant()), SparseC(matrix_ * e.coeffs()));
}

CMatrix LinearMap::operator()(const CMatrix& m) const {
  if (m.rows() != inRows_ || m.cols() != inCols_) throw Error(ErrorCode::ShapeMismatch, "linear map input shape");
  return unvec_rowmajor(matrix_ * vec_rowmajor(m), outRows_, outCols_);
}

MatExpr scalar_times(const ScalarExpr& s, const CMatrix& m) {
  const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
  const CVector v = vec_rowmajor(m);
  std::vector<Eigen::Triplet<Complex>> t;
  for (SparseR::InnerIterator it(s.coeffs()); it; ++it)
    for (int i = 0; i < v.size(); ++i)
      if (v(i) != Complex(0.0)) t.emplace_back(i, static_cast<int>(it.index()), it.value() * v(i));
  SparseC c(rows * cols, s.coeffs().size());
  c.setFromTriplets(t.begin(), t.end());
  return MatExpr(rows, cols, s.constant() * m, std::move(c));
}

MatExpr block_matrix(const std::vector<std::vector<MatExpr>>& blocks) {
  const std::size_t br = blocks.size();
  if (br == 0) throw Error(ErrorCode::ShapeMismatch, "empty block matrix");
  const std::size_t bc = blocks[0].size();
  std::vector<int> heights(br, 0), widths(bc, 0);
  for (std::size_t i = 0; i < br; ++i) {
    if (blocks[i].size() != bc) throw Error(ErrorCode::ShapeMismatch, "ragged block matrix");
    for (std::size_t j = 0; j < bc; ++j) {
      const MatExpr& b = blocks[i][j];
      if (b.rows() == 0) continue;
      if ((heights[i] && heights[i] != b.rows()) || (widths[j] && widths[j] != b.cols()))
        throw Error(ErrorCode::ShapeMismatch, "inconsistent block sizes");
      heights[i] = b.rows();
      widths[j] = b.cols();
    }
  }
  int R = 0, C = 0;
  for (int h : heights) R += h;
  for (int w : widths) C += w;
  Eigen::Index n = 0;
  for (const auto& row : blocks)
    for (const auto& b : row) n = std::max(n, b.coeffs().cols());
  MatExpr out(CMatrix::Zero(R, C));
  int r0 = 0;
  for (std::size_t i = 0; i < br; ++i) {
    int c0 = 0;
    for (std::size_t j = 0; j < bc; ++j) {
      const MatExpr& b = blocks[i][j];
      if (b.rows() > 0) {
        std::vector<Eigen::Triplet<Complex>> t;
        for (int a = 0; a < b.rows(); ++a)
          for (int k = 0; k < b.cols(); ++k) t.emplace_back((r0 + a) * C + c0 + k, a * b.cols() + k, 1.0);
        SparseC place(R * C, b.rows() * b.cols());
        place.setFromTriplets(t.begin(), t.end());
        CMatrix k = CMatrix::Zero(R, C);
        k.block(r0, c0, b.rows(), b.cols()) = b.constant();
        out = out + MatExpr(R, C, k, SparseC(place * widen(b.coeffs(), n)));
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solution

CMatrix Solution::psd_dual(ConstraintId id) const {
  const auto [first, count] = coneRows.at(static_cast<std::size_t>(id));
  const int d = coneDims.at(static_cast<std::size_t>(id));
  if (count == 0 || d == 0) throw Error(ErrorCode::InvalidArgument, "constraint has no matrix dual");
  return detail::unpack_hermitian(coneDual.data() + first, d);
}

double Solution::scalar_dual(ConstraintId id) const {
  const auto [first, count] = coneRows.at(static_cast<std::size_t>(id));
  if (count != 1) throw Error(ErrorCode::InvalidArgument, "constraint has no scalar dual");
  return coneDual(first);
}

// ---------------------------------------------------------------------------
// Problem

MatExpr Problem::hermitian(const std::string& name, int dim, bool psd) {
  const int offset = numVars_;
  const int size = dim * dim;
  numVars_ += size;
  std::vector<Eigen::Triplet<Complex>> t;
  int k = offset;
  for (int i = 0; i < dim; ++i) t.emplace_back(i * dim + i, k++, 1.0);
  for (int j = 0; j < dim; ++j)
    for (int i = j + 1; i < dim; ++i) {
      t.emplace_back(i * dim + j, k, 1.0);
      t.emplace_back(j * dim + i, k, 1.0);
      ++k;
      t.emplace_back(i * dim + j, k, Complex(0.0, 1.0));
      t.emplace_back(j * dim + i, k, Complex(0.0, -1.0));
      ++k;
    }
  SparseC c(size, numVars_);
  c.setFromTriplets(t.begin(), t.end());
  MatExpr e(dim, dim, CMatrix::Zero(dim, dim), std::move(c));
  blocks_.push_back({name, dim, dim, psd ? BlockCone::PsdHermitian : BlockCone::FreeHermitian, offset, size});
  if (psd) this->psd(e);
  return e;
}

MatExpr Problem::complex_matrix(const std::string& name, int rows, int cols) {
  const int offset = numVars_;
  const int size = 2 * rows * cols;
  numVars_ += size;
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < rows * cols; ++i) {
    t.emplace_back(i, offset + 2 * i, 1.0);
    t.emplace_back(i, offset + 2 * i + 1, Complex(0.0, 1.0));
  }
  SparseC c(rows * cols, numVars_);
  c.setFromTriplets(t.begin(), t.end());
  blocks_.push_back({name, rows, cols, BlockCone::FreeComplex, offset, size});
  return MatExpr(rows, cols, CMatrix::Zero(rows, cols), std::move(c));
}

ScalarExpr Problem::scalar(const std::string& name, bool nonneg) {
  const int offset = numVars_++;
  SparseR v(numVars_);
  v.insert(offset) = 1.0;
  ScalarExpr e(0.0, std::move(v));
  blocks_.push_back({name, 1, 1, nonneg ? BlockCone::NonnegScalar : BlockCone::FreeScalar, offset, 1});
  if (nonneg) this->nonneg(e);
  return e;
}

ConstraintId Problem::equal(const MatExpr& lhs, const MatExpr& rhs) {
  equalities_.push_back({lhs - rhs});
  order_.push_back({true, static_cast<int>(equalities_.size() - 1)});
  return static_cast<ConstraintId>(order_.size() - 1);
}

ConstraintId Problem::equal(const ScalarExpr& lhs, const ScalarExpr& rhs) {
  return equal(scalar_to_mat(lhs - rhs), MatExpr(CMatrix::Zero(1, 1)));
}

ConstraintId Problem::psd(const MatExpr& expr) {
  if (!is_hermitian_expr(expr)) throw Error(ErrorCode::InvalidArgument, "PSD constraint on a non-Hermitian expression");
  cones_.push_back({expr, false});
  order_.push_back({false, static_cast<int>(cones_.size() - 1)});
  return static_cast<ConstraintId>(order_.size() - 1);
}

ConstraintId Problem::nonneg(const ScalarExpr& expr) {
  cones_.push_back({scalar_to_mat(expr), true});
  order_.push_back({false, static_cast<int>(cones_.size() - 1)});
  return static_cast<ConstraintId>(order_.size() - 1);
}

void Problem::minimize(const ScalarExpr& objective) {
  objective_ = objective;
  maximize_ = false;
}

void Problem::maximize(const ScalarExpr& objective) {
  objective_ = objective;
  maximize_ = true;
}

Solution Problem::solve(const Settings& settings) const {
  const int n = numVars_;
  detail::StandardForm sf;
  Solution sol;
  sol.eqRows.assign(order_.size(), {0, 0});
  sol.coneRows.assign(order_.size(), {0, 0});
  sol.coneDims.assign(order_.size(), 0);

  // equalities
  std::vector<RMatrix> eqBlocks;
  std::vector<RVector> eqConst;
  int p = 0;
  for (std::size_t id = 0; id < order_.size(); ++id) {
    if (!order_[id].isEquality) continue;
    const MatExpr& e = equalities_[static_cast<std::size_t>(order_[id].index)].expr;
    RMatrix rows;
    RVector k;
    if (is_hermitian_expr(e))
      pack_expr(e, n, rows, k);
    else
      split_expr(e, n, rows, k);
    sol.eqRows[id] = {p, static_cast<int>(rows.rows())};
    p += static_cast<int>(rows.rows());
    eqBlocks.push_back(std::move(rows));
    eqConst.push_back(-k);
  }
  sf.A.resize(p, n);
  sf.b.resize(p);
  {
    int r = 0;
    for (std::size_t i = 0; i < eqBlocks.size(); ++i) {
      sf.A.middleRows(r, eqBlocks[i].rows()) = eqBlocks[i];
      sf.b.segment(r, eqConst[i].size()) = eqConst[i];
      r += static_cast<int>(eqBlocks[i].rows());
    }
  }

  // cones: orthant first, then PSD blocks
  int lp = 0;
  for (const auto& cc : cones_) lp += cc.scalar ? 1 : 0;
  sf.cones.lp = lp;
  int total = lp;
  for (const auto& cc : cones_)
    if (!cc.scalar) {
      sf.cones.psd.push_back(cc.expr.rows());
      total += cc.expr.rows() * cc.expr.rows();
    }
  sf.G = RMatrix::Zero(total, n);
  sf.h = RVector::Zero(total);
  int lpPos = 0, psdPos = lp;
  for (std::size_t id = 0; id < order_.size(); ++id) {
    if (order_[id].isEquality) continue;
    const ConeConstraint& cc = cones_[static_cast<std::size_t>(order_[id].index)];
    RMatrix rows;
    RVector k;
    pack_expr(cc.expr, n, rows, k);
    const int pos = cc.scalar ? lpPos : psdPos;
    sf.G.middleRows(pos, rows.rows()) = -rows;
    sf.h.segment(pos, k.size()) = k;
    sol.coneRows[id] = {pos, static_cast<int>(rows.rows())};
    sol.coneDims[id] = cc.scalar ? 0 : cc.expr.rows();
    (cc.scalar ? lpPos : psdPos) += static_cast<int>(rows.rows());
  }

  sf.c = RVector::Zero(n);
  const SparseR obj = widen(objective_.coeffs(), n);
  for (SparseR::InnerIterator it(obj); it; ++it) sf.c(it.index()) = it.value();
  const double sign = maximize_ ? -1.0 : 1.0;
  sf.c *= sign;

  const detail::StandardResult r = detail::solve_standard(sf, settings);
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.message = r.message;
  sol.x = r.x;
  sol.eqDual = r.y;
  sol.coneDual = r.z;
  sol.primalResidual = r.pres;
  sol.dualResidual = r.dres;
  sol.gap = r.gap;
  const double inf = std::numeric_limits<double>::infinity();
  switch (r.status) {
    case Status::Infeasible: {
      sol.objective = sol.dualObjective = maximize_ ? -inf : inf;
      RVector cert(r.y.size() + r.z.size());
      cert << r.y, r.z;
      sol.certificate = cert;
      break;
    }
    case Status::Unbounded:
      sol.objective = sol.dualObjective = maximize_ ? inf : -inf;
      break;
    default:
      sol.objective = sign * r.primal + objective_.constant();
      sol.dualObjective = sign * r.dual + objective_.constant();
  }
  return sol;
}

}  // namespace chanres::conic
