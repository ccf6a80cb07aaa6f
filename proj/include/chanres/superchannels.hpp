#pragma once

// Superchannels in pre/post form: Lambda(N) = U o (N (x) id_E) o V with
// V: C -> A (x) E and U: B (x) E -> D. Random free families per theory and
// monotonicity probes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chanres/core.hpp"
#include "chanres/free_sets.hpp"
#include "chanres/monotones.hpp"

namespace chanres {

struct SuperchannelDims {
  int dimA = 2;
  int dimB = 2;
  int dimC = 2;
  int dimD = 2;
  /// Ancilla dimension; 0 picks d_A d_B, lowered until d_A d_B d_E^2 fits the guard.
  int dimE = 0;
};

class Superchannel {
 public:
  /// pre: C -> A (x) E (A leading), post: B (x) E -> D (B leading).
  Superchannel(ChannelSpec pre, ChannelSpec post, int dimA, int dimB, int dimE, std::string family = "");

  const ChannelSpec& pre() const noexcept { return pre_; }
  const ChannelSpec& post() const noexcept { return post_; }
  int dim_a() const noexcept { return dimA_; }
  int dim_b() const noexcept { return dimB_; }
  int dim_c() const noexcept { return pre_.dim_in(); }
  int dim_d() const noexcept { return post_.dim_out(); }
  int dim_e() const noexcept { return dimE_; }
  /// Which construction produced it (empty for hand-made ones).
  const std::string& family() const noexcept { return family_; }

 private:
  ChannelSpec pre_;
  ChannelSpec post_;
  int dimA_;
  int dimB_;
  int dimE_;
  std::string family_;
};

ChannelSpec apply_superchannel(const Superchannel& s, const ChannelSpec& n);

/// Identity pre and post with a trivial ancilla.
Superchannel identity_superchannel(int dimA, int dimB);
/// Discards the channel and prepares sigma on D.
Superchannel replacement_superchannel(int dimA, int dimB, int dimC, const CMatrix& sigma);

int default_ancilla_dim(int dimA, int dimB);

/// A superchannel that maps the theory's free channels A -> B to free
/// channels C -> D. The theory's dims must be (A, B); for Entanglement C = A,
/// D = B with the same cut.
Superchannel random_free_superchannel(const TheorySpec& theory, const SuperchannelDims& dims, std::uint64_t seed);
/// A random member of the theory's free channel set.
ChannelSpec random_free_channel(const TheorySpec& theory, Rng& rng);

nlohmann::json superchannel_to_json(const Superchannel& s);
Superchannel superchannel_from_json(const nlohmann::json& j);

struct ProbeTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  MonotoneReport image;
  double excess = 0.0;  // image value - base value
  bool violation = false;
};

struct ProbeReport {
  Theory theory = Theory::Purity;
  Measure measure = Measure::Max;
  std::string family;
  MonotoneReport base;
  std::vector<ProbeTrial> trials;
  /// Serialized superchannels of violating trials, in trial order.
  std::vector<nlohmann::json> offenders;
  double maxExcess = 0.0;
  double tolerance = 1e-6;

  int violations() const;
};

/// Samples free superchannels (C = A, D = B) and compares measure(Lambda(N))
/// with measure(N) + tol at eps = 0.
ProbeReport monotonicity_probe(const TheorySpec& theory, Measure measure, const ChannelSpec& n, int trials,
                               std::uint64_t seed, double tol = 1e-6, const SeesawOptions& opts = {});

/// Monotone CSV header plus a superchannel column.
std::string probe_csv_header();
/// One row per trial; offending superchannels are written as JSON files
/// under dir and referenced from the last column.
std::vector<std::string> probe_csv_rows(const ProbeReport& report, const TheorySpec& theory,
                                        const std::optional<std::filesystem::path>& dir);

}  // namespace chanres
