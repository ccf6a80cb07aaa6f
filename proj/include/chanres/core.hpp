#pragma once

// Dense channel calculus: states, Choi matrices, Kraus conversion, tensor
// products, partial operations and distance measures.
//
// Conventions: a channel N: A -> B is stored through its trace-one Choi state
// (I (x) N)(Phi+) on A (x) B, input factor first, row-major basis |i>_A|j>_B.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chanres/error.hpp"

namespace chanres {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Validation tolerances shared by all state-like types.
struct Tolerances {
  static constexpr double hermitian = 1e-10;
  static constexpr double psd = 1e-9;
  static constexpr double trace = 1e-9;
  static constexpr double completeness = 1e-6;
  static constexpr double agreement = 1e-8;
};

/// Largest (d_A d_B)^n handled by tensor powers and superchannel pipelines.
inline constexpr int kDimensionGuard = 4096;

class DensityMatrix {
 public:
  /// Validates Hermiticity, positivity and unit trace.
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const CVector& psi);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const noexcept { return entries_; }

 private:
  CMatrix entries_;
};

class ChoiMatrix {
 public:
  /// Validates the Choi-state invariants including Tr_B = I/d_A.
  ChoiMatrix(int dimIn, int dimOut, CMatrix entries);

  int dim_in() const noexcept { return dimIn_; }
  int dim_out() const noexcept { return dimOut_; }
  int dim() const noexcept { return dimIn_ * dimOut_; }
  const CMatrix& matrix() const noexcept { return entries_; }

 private:
  int dimIn_;
  int dimOut_;
  CMatrix entries_;
};

class ChannelSpec {
 public:
  static ChannelSpec from_kraus(std::vector<CMatrix> kraus, int dimIn, int dimOut);
  static ChannelSpec from_choi(ChoiMatrix choi);
  /// Both representations; they must agree within Tolerances::agreement.
  static ChannelSpec from_both(std::vector<CMatrix> kraus, ChoiMatrix choi);

  int dim_in() const noexcept { return choi_.dim_in(); }
  int dim_out() const noexcept { return choi_.dim_out(); }
  const ChoiMatrix& choi() const noexcept { return choi_; }
  const std::optional<std::vector<CMatrix>>& kraus() const noexcept { return kraus_; }

 private:
  explicit ChannelSpec(ChoiMatrix choi, std::optional<std::vector<CMatrix>> kraus = std::nullopt)
      : choi_(std::move(choi)), kraus_(std::move(kraus)) {}

  ChoiMatrix choi_;
  std::optional<std::vector<CMatrix>> kraus_;
};

// ---------------------------------------------------------------------------
// Generic matrix helpers

bool is_hermitian(const CMatrix& m, double tol = Tolerances::hermitian);
double min_eigenvalue(const CMatrix& hermitian);
RVector eigenvalues(const CMatrix& hermitian);
CMatrix hermitian_part(const CMatrix& m);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix sqrtm_psd(const CMatrix& m);
/// Sum of singular values.
double trace_norm(const CMatrix& m);
/// Von Neumann entropy in bits.
double entropy(const CMatrix& rho);
/// Shannon entropy in bits of a probability vector.
double shannon_entropy(std::span<const double> p);

int product(std::span<const int> dims);

/// Permutes tensor factors: output factor k is input factor perm[k].
CMatrix permute_subsystems(const CMatrix& op, std::span<const int> dims, std::span<const int> perm);
/// Transposes the listed tensor factors.
CMatrix partial_transpose(const CMatrix& op, std::span<const int> dims, std::span<const int> which);
/// Traces out the listed tensor factors.
CMatrix partial_trace(const CMatrix& op, std::span<const int> dims, std::span<const int> traced);

// ---------------------------------------------------------------------------
// Channel calculus

ChoiMatrix kraus_to_choi(std::span<const CMatrix> kraus, int dimIn, int dimOut);
/// Kraus operators from an eigendecomposition of the Choi state.
std::vector<CMatrix> choi_to_kraus(const ChoiMatrix& choi, double cutoff = 1e-12);

/// (N (x) I_ancilla)(input) with the channel acting on the leading factor.
DensityMatrix apply_channel(const ChoiMatrix& choi, const DensityMatrix& input, int ancillaDim);

/// (I_left (x) N (x) I_right)(op) for an arbitrary operator; the channel
/// is given by its Choi state and may be any Hermiticity-preserving map.
CMatrix apply_local(const CMatrix& choi, int dimIn, int dimOut, const CMatrix& op, int left,
                    int right);

/// Choi of N^{(x)n} reordered as (all inputs) (x) (all outputs).
ChoiMatrix tensor_power(const ChoiMatrix& choi, int n);
/// Choi of N1 (x) N2 with inputs A1 A2 before outputs B1 B2.
ChoiMatrix tensor_product(const ChoiMatrix& first, const ChoiMatrix& second);
/// Choi of second o first.
ChoiMatrix compose(const ChoiMatrix& first, const ChoiMatrix& second);

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Fidelity for PSD operators without validation.
double fidelity_psd(const CMatrix& rho, const CMatrix& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// |Phi+><Phi+| on C^d (x) C^d.
CMatrix max_entangled(int d);

// ---------------------------------------------------------------------------
// Standard channels

namespace channels {

ChannelSpec unitary(const CMatrix& u);
ChannelSpec identity(int d);
/// rho -> (1-p) rho + p I/d
ChannelSpec depolarizing(int d, double p);
ChannelSpec fully_depolarizing(int dIn, int dOut);
ChannelSpec replacement(int dIn, const CMatrix& sigma);
ChannelSpec dephasing(int d);
/// State preparation with trivial (dimension one) input.
ChannelSpec preparation(const CMatrix& state);
/// State preparation ignoring a dIn-dimensional input.
ChannelSpec preparation(int dIn, const CMatrix& state);

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix hadamard();
CMatrix cnot();

}  // namespace channels

// ---------------------------------------------------------------------------
// Random objects (seeded, deterministic)

using Rng = std::mt19937_64;

CMatrix ginibre(Rng& rng, int rows, int cols);
CMatrix haar_unitary(Rng& rng, int d);
CVector haar_pure_state(Rng& rng, int d);
CMatrix random_density(Rng& rng, int d, int rank = -1);
/// Random CPTP map with the given number of Kraus operators.
ChannelSpec random_channel(Rng& rng, int dIn, int dOut, int numKraus = -1);

}  // namespace chanres
