#pragma once

// One-shot distillation and dilution brackets from monotone values and the
// target's regularized measures.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chanres/core.hpp"
#include "chanres/free_sets.hpp"
#include "chanres/monotones.hpp"

namespace chanres {

enum class Task { Distill, Dilute };
std::string_view token(Task task);
Task parse_task(std::string_view token);

/// A monotone value that entered a bracket.
struct RateInput {
  std::string name;  // e.g. "Htilde(N)", "m_LR(2)"
  double value = 0.0;
  BoundKind kind = BoundKind::Exact;
  bool relaxed = false;
};

struct RateBounds {
  Task task = Task::Distill;
  int nLower = 0;
  std::optional<int> nUpper;  // empty means +inf
  double epsilon = 0.0;
  std::string lowerTag;
  std::string upperTag;
  std::vector<RateInput> inputs;
  std::vector<std::string> flags;
  std::string diagnostic;

  /// "lower:<tag>;upper:<tag>"
  std::string theorem_tag() const;
  bool has_flag(std::string_view f) const;
};

struct RateOptions {
  SeesawOptions seesaw{};
  int nCap = 64;
  double snap = 1e-9;
  /// Added to the snap for values coming out of the conic solver (its accepted tolerance).
  double solverAccuracy = 1e-7;

  double tie() const { return snap + solverAccuracy; }
};

/// Largest n in [0, cap] with n <= value / m(n) (0 if none); sets capped when cap itself qualifies.
int search_max_n(double value, const std::function<double(int)>& m, int cap, double snap, bool* capped = nullptr);
/// Smallest n in [0, cap] with n >= value / m(n); returns -1 if none up to cap.
int search_min_n(double value, const std::function<double(int)>& m, int cap, double snap);

/// `theory` must carry a registered target (see registered_theory); N may have other dims.
RateBounds distill_bounds(const ChannelSpec& n, const TheorySpec& theory, double eps, const RateOptions& opts = {});
RateBounds dilute_bounds(const ChannelSpec& n, const TheorySpec& theory, double eps, const RateOptions& opts = {});
RateBounds rate_bounds(Task task, const ChannelSpec& n, const TheorySpec& theory, double eps,
                       const RateOptions& opts = {});

struct ConstantTrace {
  bool constant = false;
  double maxValue = 0.0;
  double minValue = 0.0;
};

/// Extremes of Tr[X Phi_target^{(x)n}] over normalized free Choi states X.
ConstantTrace constant_trace_check(const TheorySpec& theory, int n);

struct AsymptoticEstimate {
  std::string label = "finite-n estimate, not the limit";
  Measure measure = Measure::Max;
  std::vector<double> perCopy;  // D^0(N^{(x)n}) / n for n = 1..nMax
  std::vector<BoundKind> kinds;
  /// Purity only: S(N)/2 from the channel entropy.
  std::optional<double> anchor;
  std::optional<double> channelEntropy;
};

AsymptoticEstimate asymptotic_estimate(const ChannelSpec& n, const TheorySpec& theory, int nMax,
                                       Measure measure = Measure::Max, const SeesawOptions& opts = {});

std::string rates_csv_header();
std::string rates_csv_row(const TheorySpec& theory, const RateBounds& b);

}  // namespace chanres
