#include <cmath>
#include <random>

#include "chanres/error.hpp"
#include "chanres/rates.hpp"
#include "doctest.h"

using namespace chanres;

namespace {

RateOptions quick() {
  RateOptions o;
  o.seesaw.restarts = 4;
  return o;
}

double h3(double p) {
  const double lam[4] = {1 - 3 * p / 4, p / 4, p / 4, p / 4};
  double h = 0;
  for (double x : lam)
    if (x > 0) h -= x * std::log2(x);
  return h;
}

}  // namespace

TEST_CASE("task tokens") {
  CHECK(parse_task("distill") == Task::Distill);
  CHECK(parse_task("Dilution") == Task::Dilute);
  CHECK(token(Task::Dilute) == "dilute");
  CHECK_THROWS_AS(parse_task("convert"), Error);
}

TEST_CASE("n searches satisfy their defining inequalities") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 6.0), um(0.3, 2.5);
  for (int t = 0; t < 200; ++t) {
    const double v = u(rng);
    const double a = um(rng), slope = um(rng) * 0.1;
    const auto m = [&](int n) { return a + slope * std::log(n); };
    const int nl = search_max_n(v, m, 64, 1e-9);
    if (nl > 0) CHECK(nl <= v / m(nl) + 1e-9);
    CHECK(nl + 1 > v / m(nl + 1) + 1e-9);
    const int nu = search_min_n(v, m, 64, 1e-9);
    REQUIRE(nu >= 0);
    CHECK(nu >= v / std::max(m(std::max(nu, 1)), 1e-300) - 1e-9);
    if (nu > 1) CHECK(nu - 1 < v / m(nu - 1) - 1e-9);
  }
  bool capped = false;
  CHECK(search_max_n(1e6, [](int) { return 1.0; }, 64, 1e-9, &capped) == 64);
  CHECK(capped);
  CHECK(search_min_n(1e6, [](int) { return 1.0; }, 64, 1e-9) == -1);
  CHECK(search_min_n(0.0, [](int) { return 1.0; }, 64, 1e-9) == 0);
  // snapping: 2 - 1e-10 counts as 2
  CHECK(search_max_n(2.0 - 1e-10, [](int) { return 1.0; }, 64, 1e-9) == 2);
  CHECK(search_min_n(2.0 + 1e-10, [](int) { return 1.0; }, 64, 1e-9) == 2);
}

TEST_CASE("free channels give [0, 0]") {
  Rng rng(1);
  for (const auto& [id, name] : registered_targets()) {
    if (name == "CNOT") continue;
    const TheorySpec th = registered_theory(id, name);
    const ChannelSpec f = channels::fully_depolarizing(2, 2);
    for (Task task : {Task::Distill, Task::Dilute}) {
      const RateBounds b = rate_bounds(task, f, th, 0.0, quick());
      CHECK_MESSAGE(b.nLower == 0, token(id) << " " << name);
      REQUIRE(b.nUpper);
      CHECK_MESSAGE(*b.nUpper == 0, token(id) << " " << name << " " << token(task));
    }
  }
}

TEST_CASE("quantum capacity brackets for two identity qubits") {
  const TheorySpec th = registered_theory(Theory::QuantumCapacity, "I2");
  const ChannelSpec i4 = channels::identity(4);
  const RateBounds d = distill_bounds(i4, th, 0.0, quick());
  CHECK(d.nLower == 2);
  REQUIRE(d.nUpper);
  CHECK(*d.nUpper == 2);
  CHECK(d.theorem_tag() == "lower:cor1;upper:cor1");
  const RateBounds c = dilute_bounds(i4, th, 0.0, quick());
  CHECK(c.nLower == 2);
  REQUIRE(c.nUpper);
  CHECK(*c.nUpper == 2);
  CHECK(c.theorem_tag() == "lower:cor2;upper:cor2");
  // the 4 -> 4 free set is the PPT relaxation
  CHECK(d.has_flag("upper-not-certified-tight"));
}

TEST_CASE("coherence: Hadamard dilution") {
  const TheorySpec th = registered_theory(Theory::Coherence, "Had");
  const RateBounds b = dilute_bounds(channels::unitary(channels::hadamard()), th, 0.0, quick());
  CHECK(b.nLower == 1);
  REQUIRE(b.nUpper);
  CHECK(*b.nUpper == 1);
  CHECK(b.theorem_tag() == "lower:cor3;upper:cor3");
  // identity (overlap 0) and dephasing (overlap 1/4) are both incoherent
  CHECK(b.has_flag("constant-trace-fails"));
}

TEST_CASE("entanglement: CNOT to Phi+ preparation") {
  const TheorySpec th = registered_theory(Theory::Entanglement, "GPhi+");
  const ChannelSpec cnot = channels::unitary(channels::cnot());
  const RateBounds b = distill_bounds(cnot, th, 0.0, quick());
  CHECK(b.theorem_tag() == "lower:cor4;upper:cor4");
  double ht = -1, hi = -1;
  for (const auto& in : b.inputs) {
    if (in.name == "Htilde(N)") ht = in.value;
    if (in.name == "H(N).hi") hi = in.value;
  }
  REQUIRE(ht >= 0);
  CHECK(b.nLower == static_cast<int>(std::floor(ht + 1e-7)));
  REQUIRE(b.nUpper);
  CHECK(*b.nUpper == static_cast<int>(std::floor(hi + 1e-7)));
  CHECK(*b.nUpper <= 2);
}

TEST_CASE("computed regularized measures when no constant is registered") {
  const TheorySpec th = registered_theory(Theory::Entanglement, "CNOT");
  CHECK(th.analyticM.empty());
  const RateBounds b = dilute_bounds(channels::unitary(channels::cnot()), th, 0.0, quick());
  CHECK(b.has_flag("m-computed"));
  CHECK(b.theorem_tag() == "lower:thm2;upper:thm2");
  CHECK(b.nLower == 1);
  REQUIRE(b.nUpper);
  CHECK(*b.nUpper == 1);
}

TEST_CASE("depolarizing grid: brackets shrink with noise") {
  const TheorySpec th = registered_theory(Theory::QuantumCapacity, "I2");
  int prevLo = 1 << 20, prevHi = 1 << 20, prevDilLo = 1 << 20, prevDilHi = 1 << 20;
  for (double p : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const ChannelSpec n = channels::depolarizing(2, p);
    const RateBounds d = distill_bounds(n, th, 0.01, quick());
    const RateBounds c = dilute_bounds(n, th, 0.01, quick());
    REQUIRE(d.nUpper);
    REQUIRE(c.nUpper);
    CHECK(d.nLower <= prevLo);
    CHECK(*d.nUpper <= prevHi);
    CHECK(c.nLower <= prevDilLo);
    CHECK(*c.nUpper <= prevDilHi);
    CHECK(d.nLower <= *d.nUpper);
    CHECK(c.nLower <= *c.nUpper);
    CHECK(*c.nUpper - c.nLower <= 1);  // collapsed constants
    prevLo = d.nLower;
    prevHi = *d.nUpper;
    prevDilLo = c.nLower;
    prevDilHi = *c.nUpper;
  }
}

TEST_CASE("larger epsilon never hurts") {
  const TheorySpec th = registered_theory(Theory::QuantumCapacity, "I2");
  const ChannelSpec n = channels::depolarizing(2, 0.1);
  int lo = -1, hi = 1 << 20;
  for (double eps : {0.0, 0.05, 0.2, 0.5}) {
    const RateBounds d = distill_bounds(n, th, eps, quick());
    const RateBounds c = dilute_bounds(n, th, eps, quick());
    CHECK(d.nLower >= lo);
    REQUIRE(c.nUpper);
    CHECK(*c.nUpper <= hi);
    lo = d.nLower;
    hi = *c.nUpper;
  }
}

TEST_CASE("constant trace condition") {
  const ConstantTrace pur = constant_trace_check(registered_theory(Theory::Purity, "I2"), 1);
  CHECK(pur.constant);
  CHECK(pur.maxValue == doctest::Approx(0.25).epsilon(1e-7));

  // replacement channels: Tr[(I/2 (x) sigma) Phi+] = 1/4 for every sigma
  const ConstantTrace cc = constant_trace_check(registered_theory(Theory::ClassicalCapacity, "I2"), 1);
  CHECK(cc.constant);
  CHECK(cc.minValue == doctest::Approx(0.25).epsilon(1e-7));

  const ConstantTrace had = constant_trace_check(registered_theory(Theory::Coherence, "Had"), 1);
  CHECK_FALSE(had.constant);
  CHECK(std::abs(had.minValue) < 1e-7);  // identity channel
  CHECK(had.maxValue >= 0.25 - 1e-7);    // dephasing
  CHECK(had.maxValue <= 1.0);

  const ConstantTrace gp = constant_trace_check(registered_theory(Theory::Coherence, "G+"), 2);
  CHECK(gp.constant);
  CHECK(gp.maxValue == doctest::Approx(0.25).epsilon(1e-7));

  CHECK_THROWS_AS(constant_trace_check(make_theory(Theory::Coherence, 2, 2), 1), Error);
  CHECK_THROWS_AS(constant_trace_check(registered_theory(Theory::Entanglement, "CNOT"), 2), Error);
}

TEST_CASE("finite-n asymptotic estimates") {
  const TheorySpec pur = make_theory(Theory::Purity, 2, 2);
  const AsymptoticEstimate id = asymptotic_estimate(channels::identity(2), pur, 2);
  REQUIRE(id.perCopy.size() == 2);
  CHECK(id.perCopy[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(id.perCopy[1] == doctest::Approx(2.0).epsilon(1e-6));
  REQUIRE(id.anchor);
  CHECK(*id.anchor == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(id.label == "finite-n estimate, not the limit");

  const AsymptoticEstimate fr = asymptotic_estimate(channels::fully_depolarizing(2, 2), pur, 2);
  for (double v : fr.perCopy) CHECK(std::abs(v) < 1e-7);
  CHECK(std::abs(*fr.anchor) < 1e-6);

  const AsymptoticEstimate dep = asymptotic_estimate(channels::depolarizing(2, 0.4), pur, 1);
  CHECK(*dep.anchor == doctest::Approx((2.0 - h3(0.4)) / 2.0).epsilon(1e-5));

  const AsymptoticEstimate qc = asymptotic_estimate(channels::identity(2), make_theory(Theory::QuantumCapacity, 2, 2), 2,
                                                    Measure::LR);
  CHECK_FALSE(qc.anchor);
  CHECK(qc.perCopy[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(asymptotic_estimate(channels::identity(2), pur, 3), Error);
}

TEST_CASE("errors and csv") {
  const TheorySpec bare = make_theory(Theory::QuantumCapacity, 2, 2);
  try {
    distill_bounds(channels::identity(2), bare, 0.0);
    FAIL("missing target accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingTarget);
  }
  const TheorySpec th = registered_theory(Theory::QuantumCapacity, "I2");
  CHECK_THROWS_AS(dilute_bounds(channels::identity(2), th, 1.0), Error);
  const RateBounds b = dilute_bounds(channels::identity(2), th, 0.0, quick());
  CHECK(rates_csv_header() == "task,theory,target,epsilon,n_lower,n_upper,theorem_tag,flags");
  CHECK(rates_csv_row(th, b) == "dilute,qc,I2,0,1,1,lower:cor2;upper:cor2,");
  RateBounds inf = b;
  inf.nUpper.reset();
  inf.flags = {"a", "b"};
  CHECK(rates_csv_row(th, inf) == "dilute,qc,I2,0,1,inf,lower:cor2;upper:cor2,a;b");
}
