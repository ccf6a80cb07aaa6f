#include "chanres/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace chanres {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CompletenessViolation: return "CompletenessViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionGuardExceeded: return "DimensionGuardExceeded";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::UnsupportedDims: return "UnsupportedDims";
    case ErrorCode::UnsupportedTheory: return "UnsupportedTheory";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Mixed-radix digits of a flat index, most significant factor first.
void to_digits(int index, std::span<const int> dims, std::vector<int>& digits) {
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
}

int from_digits(const std::vector<int>& digits, std::span<const int> dims) {
  int index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

void validate_state_like(const CMatrix& m, const char* what) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::ShapeMismatch,
          std::string(what) + " must be a nonempty square matrix");
  require(m.allFinite(), ErrorCode::InvalidState, std::string(what) + " has non-finite entries");
  require(max_abs(m - m.adjoint()) <= Tolerances::hermitian, ErrorCode::InvalidState,
          std::string(what) + " is not Hermitian");
  require(std::abs(m.trace() - Complex(1.0)) <= Tolerances::trace, ErrorCode::InvalidState,
          std::string(what) + " does not have unit trace");
  require(min_eigenvalue(hermitian_part(m)) >= -Tolerances::psd, ErrorCode::InvalidState,
          std::string(what) + " is not positive semidefinite");
}

}  // namespace

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  validate_state_like(entries_, "density matrix");
  entries_ = hermitian_part(entries_);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  require(dim > 0, ErrorCode::ShapeMismatch, "dimension must be positive");
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  require(psi.size() > 0 && psi.norm() > 0.0, ErrorCode::InvalidState, "zero state vector");
  const CVector v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint());
}

ChoiMatrix::ChoiMatrix(int dimIn, int dimOut, CMatrix entries)
    : dimIn_(dimIn), dimOut_(dimOut), entries_(std::move(entries)) {
  require(dimIn > 0 && dimOut > 0, ErrorCode::ShapeMismatch, "channel dimensions must be positive");
  require(entries_.rows() == dimIn * dimOut && entries_.cols() == dimIn * dimOut,
          ErrorCode::ShapeMismatch, "Choi matrix size does not match d_A * d_B");
  validate_state_like(entries_, "Choi matrix");
  entries_ = hermitian_part(entries_);
  const int dims[2] = {dimIn, dimOut};
  const int traced[1] = {1};
  const CMatrix marginal = partial_trace(entries_, dims, traced);
  require(max_abs(marginal - CMatrix::Identity(dimIn, dimIn) / double(dimIn)) <= Tolerances::trace,
          ErrorCode::InvalidState, "Choi matrix is not trace preserving (Tr_B != I/d_A)");
}

ChannelSpec ChannelSpec::from_kraus(std::vector<CMatrix> kraus, int dimIn, int dimOut) {
  ChoiMatrix choi = kraus_to_choi(kraus, dimIn, dimOut);
  return ChannelSpec(std::move(choi), std::move(kraus));
}

ChannelSpec ChannelSpec::from_choi(ChoiMatrix choi) { return ChannelSpec(std::move(choi)); }

ChannelSpec ChannelSpec::from_both(std::vector<CMatrix> kraus, ChoiMatrix choi) {
  const ChoiMatrix fromKraus = kraus_to_choi(kraus, choi.dim_in(), choi.dim_out());
  require(max_abs(fromKraus.matrix() - choi.matrix()) <= Tolerances::agreement,
          ErrorCode::InvalidState, "Kraus and Choi representations disagree");
  return ChannelSpec(std::move(choi), std::move(kraus));
}

// ---------------------------------------------------------------------------

bool is_hermitian(const CMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

RVector eigenvalues(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver failed");
  return es.eigenvalues();
}

double min_eigenvalue(const CMatrix& hermitian) { return eigenvalues(hermitian).minCoeff(); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix sqrtm_psd(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "matrix square root did not converge");
  const RVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

double entropy(const CMatrix& rho) {
  const RVector ev = eigenvalues(hermitian_part(rho));
  double s = 0.0;
  for (double x : ev)
    if (x > 1e-15) s -= x * std::log2(x);
  return s;
}

double shannon_entropy(std::span<const double> p) {
  double s = 0.0;
  for (double x : p)
    if (x > 1e-15) s -= x * std::log2(x);
  return s;
}

int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

CMatrix permute_subsystems(const CMatrix& op, std::span<const int> dims, std::span<const int> perm) {
  const int total = product(dims);
  require(op.rows() == total && op.cols() == total, ErrorCode::DimensionMismatch,
          "operator size does not match subsystem dimensions");
  require(perm.size() == dims.size(), ErrorCode::DimensionMismatch, "permutation size mismatch");
  std::vector<int> outDims(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) outDims[k] = dims[perm[k]];

  std::vector<int> map(total), digits(dims.size()), outDigits(dims.size());
  for (int i = 0; i < total; ++i) {
    to_digits(i, dims, digits);
    for (std::size_t k = 0; k < dims.size(); ++k) outDigits[k] = digits[perm[k]];
    map[i] = from_digits(outDigits, outDims);
  }
  CMatrix out(total, total);
  for (int j = 0; j < total; ++j)
    for (int i = 0; i < total; ++i) out(map[i], map[j]) = op(i, j);
  return out;
}

CMatrix partial_transpose(const CMatrix& op, std::span<const int> dims, std::span<const int> which) {
  const int total = product(dims);
  require(op.rows() == total && op.cols() == total, ErrorCode::DimensionMismatch,
          "operator size does not match subsystem dimensions");
  for (int w : which)
    require(w >= 0 && w < static_cast<int>(dims.size()), ErrorCode::DimensionMismatch,
            "partial transpose subsystem out of range");
  std::vector<int> r(dims.size()), c(dims.size());
  CMatrix out(total, total);
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      to_digits(i, dims, r);
      to_digits(j, dims, c);
      for (int w : which) std::swap(r[w], c[w]);
      out(from_digits(r, dims), from_digits(c, dims)) = op(i, j);
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& op, std::span<const int> dims, std::span<const int> traced) {
  const int total = product(dims);
  require(op.rows() == total && op.cols() == total, ErrorCode::DimensionMismatch,
          "operator size does not match subsystem dimensions");
  std::vector<bool> isTraced(dims.size(), false);
  for (int t : traced) {
    require(t >= 0 && t < static_cast<int>(dims.size()), ErrorCode::DimensionMismatch,
            "partial trace subsystem out of range");
    isTraced[t] = true;
  }
  std::vector<int> keptDims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!isTraced[k]) keptDims.push_back(dims[k]);
  const int keptTotal = product(keptDims);

  CMatrix out = CMatrix::Zero(keptTotal, keptTotal);
  std::vector<int> r(dims.size()), c(dims.size()), kr(keptDims.size()), kc(keptDims.size());
  for (int i = 0; i < total; ++i) {
    to_digits(i, dims, r);
    for (int j = 0; j < total; ++j) {
      to_digits(j, dims, c);
      bool diagonal = true;
      int m = 0;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (isTraced[k]) {
          if (r[k] != c[k]) {
            diagonal = false;
            break;
          }
        } else {
          kr[m] = r[k];
          kc[m] = c[k];
          ++m;
        }
      }
      if (diagonal) out(from_digits(kr, keptDims), from_digits(kc, keptDims)) += op(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ChoiMatrix kraus_to_choi(std::span<const CMatrix> kraus, int dimIn, int dimOut) {
  require(!kraus.empty(), ErrorCode::ShapeMismatch, "empty Kraus list");
  require(dimIn > 0 && dimOut > 0, ErrorCode::ShapeMismatch, "channel dimensions must be positive");
  CMatrix completeness = CMatrix::Zero(dimIn, dimIn);
  for (const CMatrix& k : kraus) {
    require(k.rows() == dimOut && k.cols() == dimIn, ErrorCode::ShapeMismatch,
            "Kraus operator shape must be d_B x d_A");
    completeness += k.adjoint() * k;
  }
  const double deviation = max_abs(completeness - CMatrix::Identity(dimIn, dimIn));
  require(deviation <= Tolerances::completeness, ErrorCode::CompletenessViolation,
          "sum of K^dag K deviates from identity by " + std::to_string(deviation));

  // Snap small completeness defects: K -> K S^{-1/2}.
  CMatrix correction = CMatrix::Identity(dimIn, dimIn);
  if (deviation > 1e-13) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(completeness));
    correction = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().adjoint();
  }

  const int dim = dimIn * dimOut;
  CMatrix choi = CMatrix::Zero(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dimIn));
  CVector v(dim);
  for (const CMatrix& k0 : kraus) {
    const CMatrix k = k0 * correction;
    for (int i = 0; i < dimIn; ++i)
      for (int b = 0; b < dimOut; ++b) v(i * dimOut + b) = k(b, i) * norm;
    choi.noalias() += v * v.adjoint();
  }
  return ChoiMatrix(dimIn, dimOut, std::move(choi));
}

std::vector<CMatrix> choi_to_kraus(const ChoiMatrix& choi, double cutoff) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(choi.matrix());
  const int dA = choi.dim_in(), dB = choi.dim_out();
  std::vector<CMatrix> kraus;
  for (int k = static_cast<int>(es.eigenvalues().size()) - 1; k >= 0; --k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda <= cutoff) continue;
    const double scale = std::sqrt(dA * lambda);
    CMatrix op(dB, dA);
    for (int i = 0; i < dA; ++i)
      for (int b = 0; b < dB; ++b) op(b, i) = scale * es.eigenvectors()(i * dB + b, k);
    kraus.push_back(std::move(op));
  }
  return kraus;
}

CMatrix apply_local(const CMatrix& choi, int dimIn, int dimOut, const CMatrix& op, int left,
                    int right) {
  require(choi.rows() == dimIn * dimOut, ErrorCode::DimensionMismatch, "Choi size mismatch");
  require(op.rows() == left * dimIn * right && op.cols() == op.rows(), ErrorCode::DimensionMismatch,
          "operator dimension does not match channel input and ancillas");
  const int outDim = left * dimOut * right;
  CMatrix out = CMatrix::Zero(outDim, outDim);
  const double scale = static_cast<double>(dimIn);
  auto inIdx = [&](int l, int a, int r) { return (l * dimIn + a) * right + r; };
  auto outIdx = [&](int l, int b, int r) { return (l * dimOut + b) * right + r; };
  for (int a = 0; a < dimIn; ++a) {
    for (int ap = 0; ap < dimIn; ++ap) {
      // Block N(|a><a'|) = d_A * <a| Phi_N |a'>.
      const CMatrix block = scale * choi.block(a * dimOut, ap * dimOut, dimOut, dimOut);
      for (int l = 0; l < left; ++l)
        for (int r = 0; r < right; ++r)
          for (int lp = 0; lp < left; ++lp)
            for (int rp = 0; rp < right; ++rp) {
              const Complex coeff = op(inIdx(l, a, r), inIdx(lp, ap, rp));
              if (coeff == Complex(0.0)) continue;
              for (int b = 0; b < dimOut; ++b)
                for (int bp = 0; bp < dimOut; ++bp)
                  out(outIdx(l, b, r), outIdx(lp, bp, rp)) += coeff * block(b, bp);
            }
    }
  }
  return out;
}

DensityMatrix apply_channel(const ChoiMatrix& choi, const DensityMatrix& input, int ancillaDim) {
  require(ancillaDim > 0 && input.dim() == choi.dim_in() * ancillaDim, ErrorCode::DimensionMismatch,
          "input dimension must equal d_A * ancillaDim");
  CMatrix out = apply_local(choi.matrix(), choi.dim_in(), choi.dim_out(), input.matrix(), 1, ancillaDim);
  return DensityMatrix(hermitian_part(out));
}

ChoiMatrix tensor_power(const ChoiMatrix& choi, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "tensor power requires n >= 1");
  double total = std::pow(static_cast<double>(choi.dim()), n);
  require(total <= kDimensionGuard, ErrorCode::DimensionGuardExceeded,
          "n-copy Choi dimension exceeds " + std::to_string(kDimensionGuard));
  if (n == 1) return choi;
  CMatrix acc = choi.matrix();
  for (int k = 1; k < n; ++k) acc = kron(acc, choi.matrix());
  std::vector<int> dims, perm;
  for (int k = 0; k < n; ++k) {
    dims.push_back(choi.dim_in());
    dims.push_back(choi.dim_out());
  }
  for (int k = 0; k < n; ++k) perm.push_back(2 * k);
  for (int k = 0; k < n; ++k) perm.push_back(2 * k + 1);
  int dIn = 1, dOut = 1;
  for (int k = 0; k < n; ++k) {
    dIn *= choi.dim_in();
    dOut *= choi.dim_out();
  }
  return ChoiMatrix(dIn, dOut, permute_subsystems(acc, dims, perm));
}

ChoiMatrix tensor_product(const ChoiMatrix& first, const ChoiMatrix& second) {
  require(static_cast<double>(first.dim()) * second.dim() <= kDimensionGuard,
          ErrorCode::DimensionGuardExceeded, "product Choi dimension too large");
  const CMatrix joint = kron(first.matrix(), second.matrix());
  const int dims[4] = {first.dim_in(), first.dim_out(), second.dim_in(), second.dim_out()};
  const int perm[4] = {0, 2, 1, 3};
  return ChoiMatrix(first.dim_in() * second.dim_in(), first.dim_out() * second.dim_out(),
                    permute_subsystems(joint, dims, perm));
}

ChoiMatrix compose(const ChoiMatrix& first, const ChoiMatrix& second) {
  require(first.dim_out() == second.dim_in(), ErrorCode::DimensionMismatch,
          "composition dimension mismatch");
  CMatrix out = apply_local(second.matrix(), second.dim_in(), second.dim_out(), first.matrix(),
                            first.dim_in(), 1);
  return ChoiMatrix(first.dim_in(), second.dim_out(), hermitian_part(out));
}

double fidelity_psd(const CMatrix& rho, const CMatrix& sigma) {
  const CMatrix root = sqrtm_psd(rho);
  const RVector ev = eigenvalues(hermitian_part(root * sigma * root));
  double s = 0.0;
  for (double x : ev) s += std::sqrt(std::max(x, 0.0));
  const double f = s * s;
  if (!std::isfinite(f)) throw Error(ErrorCode::NumericalFailure, "fidelity evaluation failed");
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), ErrorCode::DimensionMismatch, "fidelity dimension mismatch");
  return fidelity_psd(rho.matrix(), sigma.matrix());
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), ErrorCode::DimensionMismatch, "trace distance dimension mismatch");
  const RVector ev = eigenvalues(hermitian_part(rho.matrix() - sigma.matrix()));
  return 0.5 * ev.cwiseAbs().sum();
}

CMatrix max_entangled(int d) {
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v * v.adjoint();
}

// ---------------------------------------------------------------------------

namespace channels {

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix hadamard() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

CMatrix cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

ChannelSpec unitary(const CMatrix& u) {
  require(u.rows() == u.cols(), ErrorCode::ShapeMismatch, "unitary must be square");
  const int d = static_cast<int>(u.rows());
  return ChannelSpec::from_kraus({u}, d, d);
}

ChannelSpec identity(int d) { return unitary(CMatrix::Identity(d, d)); }

ChannelSpec depolarizing(int d, double p) {
  require(p >= 0.0 && p <= 1.0 + 1.0 / (d * d - 1.0), ErrorCode::InvalidArgument,
          "depolarizing parameter out of range");
  const CMatrix choi = (1.0 - p) * max_entangled(d) +
                       p * CMatrix::Identity(d * d, d * d) / static_cast<double>(d * d);
  return ChannelSpec::from_choi(ChoiMatrix(d, d, choi));
}

ChannelSpec fully_depolarizing(int dIn, int dOut) {
  const int dim = dIn * dOut;
  return ChannelSpec::from_choi(
      ChoiMatrix(dIn, dOut, CMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

ChannelSpec replacement(int dIn, const CMatrix& sigma) {
  const CMatrix pi = CMatrix::Identity(dIn, dIn) / static_cast<double>(dIn);
  return ChannelSpec::from_choi(ChoiMatrix(dIn, static_cast<int>(sigma.rows()), kron(pi, sigma)));
}

ChannelSpec dephasing(int d) {
  std::vector<CMatrix> kraus;
  for (int i = 0; i < d; ++i) {
    CMatrix k = CMatrix::Zero(d, d);
    k(i, i) = 1.0;
    kraus.push_back(std::move(k));
  }
  return ChannelSpec::from_kraus(std::move(kraus), d, d);
}

ChannelSpec preparation(const CMatrix& state) { return replacement(1, state); }

ChannelSpec preparation(int dIn, const CMatrix& state) { return replacement(dIn, state); }

}  // namespace channels

// ---------------------------------------------------------------------------

CMatrix ginibre(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

CMatrix haar_unitary(Rng& rng, int d) {
  const CMatrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Complex diag = r(i, i);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(i) *= diag / mag;
  }
  return q;
}

CVector haar_pure_state(Rng& rng, int d) {
  CVector v = ginibre(rng, d, 1).col(0);
  return v / v.norm();
}

CMatrix random_density(Rng& rng, int d, int rank) {
  const CMatrix g = ginibre(rng, d, rank > 0 ? rank : d);
  CMatrix rho = g * g.adjoint();
  return hermitian_part(rho / rho.trace().real());
}

ChannelSpec random_channel(Rng& rng, int dIn, int dOut, int numKraus) {
  const int k = numKraus > 0 ? numKraus : dIn * dOut;
  const CMatrix g = ginibre(rng, dOut * k, dIn);
  const CMatrix gram = g.adjoint() * g;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  const CMatrix invRoot = es.eigenvectors() *
                          es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          es.eigenvectors().adjoint();
  const CMatrix isometry = g * invRoot;
  std::vector<CMatrix> kraus;
  for (int j = 0; j < k; ++j) kraus.push_back(isometry.block(j * dOut, 0, dOut, dIn));
  return ChannelSpec::from_kraus(std::move(kraus), dIn, dOut);
}

}  // namespace chanres
