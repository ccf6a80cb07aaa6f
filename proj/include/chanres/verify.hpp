#pragma once

// Property suites (ordering, collapse, monotonicity) and the reproduction
// table of registered constants.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chanres/free_sets.hpp"
#include "chanres/monotones.hpp"

namespace chanres {

/// One inequality lhs >= rhs - tol (or |lhs - rhs| <= tol for equalities).
struct PropertyCheck {
  std::string property;
  std::string subject;
  double lhs = 0.0;
  double rhs = 0.0;
  bool equality = false;
  bool pass = true;

  double margin() const;  // lhs - rhs, or -|lhs - rhs| for equalities
};

struct SuiteReport {
  std::string suite;
  double tol = 1e-6;
  std::vector<PropertyCheck> checks;
  /// Trial superchannels that increased a measure, serialized; empty when none.
  std::vector<std::string> offenderFiles;

  int violations() const;
  bool pass() const { return violations() == 0; }
  /// Most negative margin (0 when every check has slack).
  double worst() const;
};

struct OrderingOptions {
  int channels = 50;
  std::vector<double> epsilons{0.0};
  double tol = 1e-6;
  std::uint64_t seed = 1;
  SeesawOptions seesaw{};
  /// Adds the chain with D_max^0 + log2(1/(1-eps)) on top (always valid).
  bool corrected = false;
};

/// LR >= D_max >= H.hi >= H.lo >= max(Htilde, Hhat) on random qubit channels.
SuiteReport verify_ordering(Theory theory, const OrderingOptions& opts);

/// For a registered preparation target: D_max(state) >= D_max(G) >= H.hi >= H.lo >=
/// max(Htilde, Hhat) >= D_H(state), and equality of the four measures when `equal`.
SuiteReport verify_collapse(Theory theory, std::string_view target, bool equal, double tol = 1e-5,
                            const SeesawOptions& opts = {});

struct MonotonicityOptions {
  int channels = 5;
  int trials = 100;
  std::vector<Measure> measures{Measure::Max, Measure::LR};
  double tol = 1e-6;
  std::uint64_t seed = 1;
  SeesawOptions seesaw{};
  std::optional<std::filesystem::path> offenderDir;
};

SuiteReport verify_monotonicity(Theory theory, const MonotonicityOptions& opts);

std::string suite_csv_header();
std::vector<std::string> suite_csv_rows(const SuiteReport& r);

struct ReproRow {
  Theory theory = Theory::Purity;
  std::string target;
  std::string measure;
  int copies = 1;
  double computed = 0.0;
  std::optional<double> computedUpper;  // H interval upper end
  double reference = 0.0;
  std::string source;  // "published" or "registered"
  BoundKind kind = BoundKind::Exact;
  bool pass = false;
};

/// Every registered constant at one copy and, where the guard allows, two.
std::vector<ReproRow> reproduce_constants(double tol = 1e-5, bool twoCopies = true, const SeesawOptions& opts = {});

std::string repro_csv_header();
std::string repro_csv_row(const ReproRow& r);

}  // namespace chanres
