// Acceptance run: one PASS/FAIL line per criterion, details underneath.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "chanres/rates.hpp"
#include "chanres/verify.hpp"

using namespace chanres;

namespace {

// tolerances, as stated per criterion
constexpr double kConstTol = 1e-5;
constexpr double kConstBudgetSeconds = 300.0;
constexpr double kRegTol = 1e-4;
constexpr double kCollapseTol = 1e-5;
constexpr double kOrderTol = 1e-6;
constexpr double kMonoTol = 1e-6;
constexpr double kDiamondTol = 1e-6;
constexpr double kFidelityTol = 1e-5;
constexpr double kSmoothTol = 1e-7;
constexpr double kEntropyIdTol = 1e-6;
constexpr double kEntropyDepTol = 1e-5;

SeesawOptions seesaw() {
  SeesawOptions o;
  o.restarts = 4;
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Detail {
  std::vector<std::string> lines;
  void add(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    lines.emplace_back(buf);
  }
};

bool criterion_1(Detail& d) {
  struct Row {
    Theory theory;
    const char* target;
    double constant;
  };
  const Row rows[] = {{Theory::Purity, "I2", 2.0},         {Theory::ClassicalCapacity, "I2", 2.0},
                      {Theory::QuantumCapacity, "I2", 1.0}, {Theory::NonUniformity, "G2", 1.0},
                      {Theory::Coherence, "Had", 1.0},      {Theory::Coherence, "G+", 1.0},
                      {Theory::Entanglement, "CNOT", 2.0},  {Theory::Entanglement, "GPhi+", 1.0}};
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (const auto& r : rows) {
    const TheorySpec th = registered_theory(r.theory, r.target);
    const ChoiMatrix g = th.target->choi();
    std::vector<std::pair<const char*, MonotoneReport>> ms{{"max", dmax(g, th)}, {"Htilde", dh_choi(g, th)}};
    // robustness is infinite when the free set has no full-rank element
    if (th.robustnessFinite) ms.insert(ms.begin(), {"LR", log_robustness(g, th)});
    for (const auto& [name, rep] : ms) {
      const bool pass = std::abs(rep.value - r.constant) <= kConstTol;
      ok = ok && pass;
      d.add("%s %s %s: computed %.9g, expected %g %s", std::string(token(r.theory)).c_str(), r.target, name,
            rep.value, r.constant, pass ? "ok" : "MISMATCH");
    }
  }
  const double t = seconds_since(t0);
  d.add("runtime %.1f s (budget %.0f s)", t, kConstBudgetSeconds);
  return ok && t <= kConstBudgetSeconds;
}

bool criterion_2(Detail& d) {
  bool ok = true;
  for (auto [theory, target] : {std::pair{Theory::QuantumCapacity, "I2"}, {Theory::Entanglement, "GPhi+"}}) {
    const TheorySpec th = registered_theory(theory, target);
    std::vector<Measure> ms{Measure::Max, Measure::Htilde, Measure::H};
    if (th.robustnessFinite) ms.insert(ms.begin(), Measure::LR);
    for (Measure m : ms) {
      const RegularizedValue one = regularized_m(m, th.target->choi(), th, 1, seesaw());
      const RegularizedValue two = regularized_m(m, th.target->choi(), th, 2, seesaw());
      bool pass = std::abs(two.value - one.value) <= kRegTol;
      if (one.upper && two.upper) pass = pass && std::abs(*two.upper - *one.upper) <= kRegTol;
      ok = ok && pass;
      d.add("%s %s %s: n=1 %.9g, n=2 %.9g %s", std::string(token(theory)).c_str(), target,
            std::string(token(m)).c_str(), one.value, two.value, pass ? "ok" : "MISMATCH");
    }
  }
  return ok;
}

bool criterion_3(Detail& d) {
  bool ok = true;
  for (auto [theory, target] : {std::pair{Theory::Coherence, "G+"}, {Theory::Entanglement, "GPhi+"}}) {
    const SuiteReport r = verify_collapse(theory, target, true, kCollapseTol, seesaw());
    for (const auto& c : r.checks)
      if (c.equality || !c.pass)
        d.add("%s %s %s: %.9g vs %.9g %s", std::string(token(theory)).c_str(), target, c.property.c_str(), c.lhs,
              c.rhs, c.pass ? "ok" : "FAIL");
    ok = ok && r.pass();
  }
  return ok;
}

bool criterion_4(Detail& d) {
  bool ok = true;
  for (Theory t : all_theories()) {
    OrderingOptions o;
    o.channels = 50;
    o.epsilons = {0.0, 0.05};
    o.tol = kOrderTol;
    o.seed = 4;
    o.seesaw = seesaw();
    o.corrected = true;
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteReport r = verify_ordering(t, o);
    int stated[2] = {0, 0}, corrected = 0;
    double worst[2] = {0.0, 0.0};
    for (const auto& c : r.checks) {
      if (c.pass) continue;
      if (c.property.starts_with("corrected")) {
        ++corrected;
        continue;
      }
      const int k = c.subject.ends_with("eps=0") ? 0 : 1;
      ++stated[k];
      worst[k] = std::min(worst[k], c.margin());
    }
    // the corrected chain replaces max^eps >= H.hi by max^0 + log2(1/(1-eps)) >= H.hi
    int correctedChain = corrected;
    for (const auto& c : r.checks)
      if (!c.pass && !c.property.starts_with("corrected") && c.property != "max>=H.hi") ++correctedChain;
    ok = ok && stated[0] == 0 && stated[1] == 0;
    d.add("%s: eps=0 violations %d (worst %.3g), eps=0.05 violations %d (worst %.3g), %.0f s",
          std::string(token(t)).c_str(), stated[0], worst[0], stated[1], worst[1], seconds_since(t0));
    d.add("%s: diagnostic, corrected chain violations %d", std::string(token(t)).c_str(), correctedChain);
  }
  return ok;
}

bool criterion_5(Detail& d) {
  bool ok = true;
  for (Theory t : all_theories()) {
    MonotonicityOptions o;
    o.channels = 5;
    o.trials = 100;
    o.tol = kMonoTol;
    o.seed = 5;
    o.seesaw = seesaw();
    const SuiteReport r = verify_monotonicity(t, o);
    ok = ok && r.pass();
    d.add("%s: %zu checks, %d increases beyond %g", std::string(token(t)).c_str(), r.checks.size(), r.violations(),
          kMonoTol);
  }
  return ok;
}

bool criterion_6(Detail& d) {
  RateOptions o;
  o.seesaw = seesaw();
  struct Case {
    const char* label;
    Task task;
    Theory theory;
    const char* target;
    ChannelSpec channel;
    int lo, hi;
  };
  const Case cases[] = {
      {"qc dilute I4", Task::Dilute, Theory::QuantumCapacity, "I2", channels::identity(4), 2, 2},
      {"qc distill I4", Task::Distill, Theory::QuantumCapacity, "I2", channels::identity(4), 2, 2},
      {"coh dilute Had", Task::Dilute, Theory::Coherence, "Had", channels::unitary(channels::hadamard()), 1, 1},
      {"ent distill CNOT -> GPhi+", Task::Distill, Theory::Entanglement, "GPhi+", channels::unitary(channels::cnot()),
       2, 2},
  };
  bool ok = true;
  for (const auto& c : cases) {
    const RateBounds b = rate_bounds(c.task, c.channel, registered_theory(c.theory, c.target), 0.0, o);
    const bool pass = b.nLower == c.lo && b.nUpper && *b.nUpper == c.hi;
    ok = ok && pass;
    d.add("%s: [%d, %s] expected [%d, %d] %s %s", c.label, b.nLower,
          b.nUpper ? std::to_string(*b.nUpper).c_str() : "inf", c.lo, c.hi, b.theorem_tag().c_str(),
          pass ? "ok" : "MISMATCH");
  }
  return ok;
}

bool criterion_7(Detail& d) {
  bool ok = true;
  const ChannelSpec id = channels::identity(2);
  for (double p : {0.1, 0.5, 1.0}) {
    // the identity-depolarizing difference is p (id - Pauli twirl); its norm is 3p/4
    const double expected = 3.0 * p / 4.0;
    const double got = diamond_distance(id, channels::depolarizing(2, p));
    const bool pass = std::abs(got - expected) <= kDiamondTol;
    ok = ok && pass;
    d.add("depolarizing p=%g: %.9g vs %.9g %s", p, got, expected, pass ? "ok" : "MISMATCH");
  }
  // |+> is mapped to the orthogonal |->
  const double z = diamond_distance(id, channels::unitary(channels::pauli_z()));
  const bool pass = std::abs(z - 1.0) <= kDiamondTol;
  d.add("Z: %.9g vs 1 %s", z, pass ? "ok" : "MISMATCH");
  return ok && pass;
}

bool criterion_8(Detail& d) {
  const TheorySpec th = make_theory(Theory::Coherence, 2, 2);
  Rng rng(8);
  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ChoiMatrix u = channels::unitary(haar_unitary(rng, 2)).choi();
    const double lhs = -std::log2(fidelity_measures(u, th, seesaw()).fidelityTilde);
    const double rhs = dh_choi(u, th).value;
    worst = std::max(worst, std::abs(lhs - rhs));
    ok = ok && std::abs(lhs - rhs) <= kFidelityTol;
  }
  d.add("10 unitaries, largest |-log2 F~ - Htilde| = %.3g", worst);
  return ok;
}

bool criterion_9(Detail& d) {
  const double eps[] = {0.0, 0.01, 0.05, 0.1};
  bool ok = true;
  for (Theory t : all_theories()) {
    const TheorySpec th = make_theory(t, 2, 2);
    int bad = 0;
    double worst = 0.0;
    for (double p : {0.0, 0.3, 0.6, 0.9}) {
      const ChoiMatrix n = channels::depolarizing(2, p).choi();
      for (const auto& f : {std::function<MonotoneReport(double)>([&](double e) { return log_robustness(n, th, e); }),
                            std::function<MonotoneReport(double)>([&](double e) { return dmax(n, th, e); })}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double e : eps) {
          const double v = f(e).value;
          if (std::isfinite(v) && v > prev + kSmoothTol) {
            ++bad;
            worst = std::max(worst, v - prev);
          }
          prev = v;
        }
      }
    }
    ok = ok && bad == 0;
    d.add("%s: LR and max over eps 0..0.1, increases %d (largest %.3g)", std::string(token(t)).c_str(), bad, worst);
  }
  return ok;
}

bool criterion_10(Detail& d) {
  const auto shannon = [](std::initializer_list<double> ps) {
    double h = 0.0;
    for (double x : ps)
      if (x > 0) h -= x * std::log2(x);
    return h;
  };
  bool ok = true;
  const double sId = channel_entropy(channels::identity(2).choi()).value;
  ok = std::abs(sId - 2.0) <= kEntropyIdTol;
  d.add("S(I2) = %.9g vs 2 %s", sId, ok ? "ok" : "MISMATCH");
  for (double p : {0.1, 0.4, 0.7, 1.0}) {
    const double expected = 2.0 - shannon({1 - 3 * p / 4, p / 4, p / 4, p / 4});
    const double got = channel_entropy(channels::depolarizing(2, p).choi()).value;
    const bool pass = std::abs(got - expected) <= kEntropyDepTol;
    ok = ok && pass;
    d.add("S(depolarizing %g) = %.9g vs %.9g %s", p, got, expected, pass ? "ok" : "MISMATCH");
  }
  const TheorySpec pur = make_theory(Theory::Purity, 2, 2);
  for (double p : {0.0, 0.4}) {
    const AsymptoticEstimate a = asymptotic_estimate(channels::depolarizing(2, p), pur, 1, Measure::Max, seesaw());
    const bool pass = a.anchor && a.channelEntropy && std::abs(*a.anchor - *a.channelEntropy / 2.0) <= 1e-12 &&
                      std::abs(*a.anchor - (2.0 - shannon({1 - 3 * p / 4, p / 4, p / 4, p / 4})) / 2.0) <=
                          kEntropyDepTol;
    ok = ok && pass;
    d.add("purity anchor, depolarizing %g: %.9g %s", p, a.anchor.value_or(-1.0), pass ? "ok" : "MISMATCH");
  }
  return ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool(Detail&)>>> criteria{
      {"constants at n = 1", criterion_1},
      {"regularization constancy at n = 2", criterion_2},
      {"collapse for G+ and GPhi+", criterion_3},
      {"ordering chain, 50 qubit channels, eps 0 and 0.05", criterion_4},
      {"monotonicity under free superchannels", criterion_5},
      {"rate brackets", criterion_6},
      {"diamond norm oracle", criterion_7},
      {"fidelity relation on Haar unitaries", criterion_8},
      {"smoothing monotonicity", criterion_9},
      {"channel entropy anchor", criterion_10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Detail d;
    bool pass = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      pass = criteria[i].second(d);
    } catch (const std::exception& e) {
      d.add("exception: %s", e.what());
    }
    std::printf("criterion %zu: %s  %s (%.1f s)\n", i + 1, pass ? "PASS" : "FAIL", criteria[i].first,
                seconds_since(t0));
    for (const auto& l : d.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
