#pragma once

// The six channel resource theories: free cones on Choi matrices, the target
// registry and membership tests.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chanres/conic.hpp"
#include "chanres/core.hpp"

namespace chanres {

enum class Theory { Purity, ClassicalCapacity, QuantumCapacity, NonUniformity, Coherence, Entanglement };

/// CLI token: purity | cc | qc | nu | coh | ent
std::string_view token(Theory theory);
std::string_view display_name(Theory theory);
Theory parse_theory(std::string_view token);
std::vector<Theory> all_theories();

enum class Relaxation { None, Ppt };

enum class TargetKind { Unitary, Preparation };

/// Tensor-factor structure of input and output with a party label (1 or 2)
/// per factor. Used by the entanglement theory.
struct Bipartition {
  std::vector<int> inDims;
  std::vector<int> inParty;
  std::vector<int> outDims;
  std::vector<int> outParty;

  int dim_in() const;
  int dim_out() const;
  /// Dimension of everything held by one party (inputs and outputs).
  int party_dim(int party) const;
  /// Factors in Choi order (inputs then outputs).
  std::vector<int> factor_dims() const;
  /// Choi-order indices of the factors held by party 2.
  std::vector<int> party2_factors() const;
  /// n parallel copies, inputs of all copies first.
  Bipartition power(int n) const;
};

/// Default cut: 4 -> 4 as (A1 A2) -> (B1 B2); 1 -> 4 as trivial -> (B1 B2);
/// 2 -> 2 as input with party 1 and output with party 2.
Bipartition default_bipartition(int dimIn, int dimOut);

struct TheorySpec {
  Theory id = Theory::Purity;
  int dimIn = 2;
  int dimOut = 2;
  std::optional<Bipartition> bipartition;
  Relaxation relaxation = Relaxation::None;

  std::string targetName;
  std::optional<ChannelSpec> target;
  TargetKind targetKind = TargetKind::Unitary;
  /// Regularized constants used by the rate formulas (measure -> value).
  std::map<std::string, double> analyticM;
  /// Constants as printed for the reproduction table.
  std::map<std::string, double> publishedConstants;
  bool robustnessFinite = false;

  /// True when the implemented free set is a strict superset of the true one,
  /// so that computed monotones are lower bounds.
  bool relaxation_flag() const;
  /// Same theory on n parallel copies (dims and bipartition replicated;
  /// target and constants dropped).
  TheorySpec power(int n) const;
  /// Same theory on other channel dims (target kept).
  TheorySpec with_dims(int dIn, int dOut) const;
  TheorySpec with_dims(int dIn, int dOut, const Bipartition& cut) const;
};

/// Theory on the given dims without a target.
TheorySpec make_theory(Theory id, int dimIn, int dimOut,
                       std::optional<Bipartition> cut = std::nullopt);

/// Registered target names: I2, Had, CNOT, G2, G+, GPhi+.
ChannelSpec target_channel(std::string_view name);
std::vector<std::pair<Theory, std::string>> registered_targets();
/// The theory configured for one of its registered targets; the default is
/// the first registered target of the theory.
TheorySpec registered_theory(Theory id, std::string_view targetName = "");

/// Linear and conic constraints describing X in cone(free set).
class FreeCone {
 public:
  explicit FreeCone(TheorySpec spec) : spec_(std::move(spec)) {}
  const TheorySpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return spec_.dimIn * spec_.dimOut; }

  /// Adds X >= 0, the trace-preservation tie and the theory constraints.
  std::vector<conic::ConstraintId> impose(conic::Problem& problem, const conic::MatExpr& x) const;
  /// Same, except that X >= 0 is left to the caller.
  std::vector<conic::ConstraintId> impose_linear_and_theory(conic::Problem& problem,
                                                           const conic::MatExpr& x) const;
  /// Largest violation of the constraints by a concrete matrix (0 if inside).
  double violation(const CMatrix& x) const;

 private:
  TheorySpec spec_;
};

FreeCone free_cone(const TheorySpec& spec);

struct Membership {
  bool free = false;
  /// Trace distance from the Choi state to the normalized free set.
  double residual = 0.0;
  bool relaxed = false;
  conic::Status status = conic::Status::Optimal;
};

Membership is_free(const ChoiMatrix& choi, const TheorySpec& spec, double tol = 1e-6);

}  // namespace chanres
