#pragma once

// Resource measures of channels relative to a theory's free set: robustness,
// max-relative entropy, hypothesis-testing measures, fidelity measures and
// the channel entropy. All logarithms are base 2.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chanres/core.hpp"
#include "chanres/free_sets.hpp"

namespace chanres {

enum class BoundKind { Exact, Lower, Upper, Heuristic };
std::string_view to_string(BoundKind kind);

/// LR | max | H | Htilde | Hhat
enum class Measure { LR, Max, H, Htilde, Hhat };
std::string_view token(Measure m);
Measure parse_measure(std::string_view token);  // case-insensitive

struct MonotoneReport {
  std::string measureName;
  double value = 0.0;  // may be +inf
  BoundKind boundKind = BoundKind::Exact;
  double epsilon = 0.0;
  bool relaxationFlag = false;
  /// Dual matrix of the defining constraint, or for +inf the Farkas ray as a column.
  std::optional<CMatrix> dualCertificate;
  double solverGap = 0.0;
  /// Solver stopped at the accepted (looser) tolerance or the seesaw hit its cap.
  bool inaccurate = false;
  /// Seesaw only: value of the best probe found against the final free channel.
  std::optional<double> upperEstimate;

  bool infinite() const;
};

/// Largest Choi dimension d_A d_B handled by the semidefinite routines.
inline constexpr int kSdpChoiDimGuard = 16;

/// Half the diamond norm of N - M.
double diamond_distance(const ChoiMatrix& n, const ChoiMatrix& m);
double diamond_distance(const ChannelSpec& n, const ChannelSpec& m);

/// log2(1 + free robustness), smoothed over the diamond ball of radius eps.
MonotoneReport log_robustness(const ChoiMatrix& n, const TheorySpec& theory, double eps = 0.0);
/// log2(1 + generalized robustness), smoothed over the diamond ball of radius eps.
MonotoneReport dmax(const ChoiMatrix& n, const TheorySpec& theory, double eps = 0.0);

/// -log2 min Tr[A sigma] over 0 <= A <= I, Tr[A rho] >= 1 - eps (semidefinite program).
double dh_state(const CMatrix& rho, const CMatrix& sigma, double eps);
/// Same quantity from the one-dimensional Lagrange dual
/// max_mu mu (1 - eps) - Tr(mu rho - sigma)_+ (support projector at eps = 0).
double dh_state_np(const CMatrix& rho, const CMatrix& sigma, double eps);

/// min over free M of D_H(Phi_N || Phi_M).
MonotoneReport dh_choi(const ChoiMatrix& n, const TheorySpec& theory, double eps = 0.0);

struct SeesawOptions {
  int restarts = 20;
  double tol = 1e-8;
  int maxAlternations = 200;
  std::uint64_t seed = 1;
};

/// Seesaw estimate of min over free M of max over pure inputs (no ancilla) of D_H.
MonotoneReport dh_unassisted(const ChoiMatrix& n, const TheorySpec& theory, double eps = 0.0,
                             const SeesawOptions& opts = {});

struct HInterval {
  MonotoneReport lo;
  MonotoneReport hi;
};

/// Certified bracket on the channel hypothesis-testing measure. The lower
/// end comes from finitely many probe inputs (with and without ancilla),
/// the upper end from D_max at eps = 0 plus log2(1/(1-eps)).
HInterval dh_channel_interval(const ChoiMatrix& n, const TheorySpec& theory, double eps = 0.0,
                              const SeesawOptions& opts = {});

struct FidelityReport {
  double fidelity = 0.0;        // F_T, by alternation
  double fidelityTilde = 0.0;   // F~_T, semidefinite program
  BoundKind fidelityKind = BoundKind::Heuristic;
  bool unitaryInput = false;
  double gap = 0.0;
};

FidelityReport fidelity_measures(const ChoiMatrix& u, const TheorySpec& theory, const SeesawOptions& opts = {});

struct EntropyReport {
  double value = 0.0;
  bool converged = true;
};

/// S(N) = max over inputs of log2 d_B - S(B|R) of the output.
EntropyReport channel_entropy(const ChoiMatrix& n, std::uint64_t seed = 1, int restarts = 8);

/// Zero-smoothing measure of n copies divided by n.
struct RegularizedValue {
  double value = 0.0;
  std::optional<double> upper;      // H only: interval upper end / n
  std::optional<double> analytic;   // registered constant, if any
  bool agrees = true;               // |value - analytic| <= 1e-5 when analytic is set
  MonotoneReport report;            // the unnormalized measure
};

RegularizedValue regularized_m(Measure measure, const ChoiMatrix& target, const TheorySpec& theory, int n,
                               const SeesawOptions& opts = {});

/// Generic dispatch used by the CLI and the verification suites. H returns the
/// interval lower end with upperEstimate holding the upper end.
MonotoneReport evaluate(Measure measure, const ChoiMatrix& n, const TheorySpec& theory, double eps,
                        const SeesawOptions& opts = {});

std::string monotone_csv_header();
std::string monotone_csv_row(const TheorySpec& theory, const MonotoneReport& r);

}  // namespace chanres
