#include <cmath>

#include "chanres/conic.hpp"
#include "chanres/monotones.hpp"
#include "doctest.h"

using namespace chanres;

namespace {

SeesawOptions quick() {
  SeesawOptions o;
  o.restarts = 4;
  return o;
}

// Generalized robustness of a 2x2 Choi over normalized PPT Choi states,
// written out directly without the free-set layer.
double ppt_generalized_robustness(const CMatrix& j) {
  using namespace conic;
  Problem p;
  auto y = p.hermitian("Y", 4);
  p.psd(LinearMap::partial_transpose({2, 2}, {0})(y));
  auto t = p.scalar("t");
  p.equal(LinearMap::partial_trace({2, 2}, {1})(y), scalar_times(t, CMatrix::Identity(2, 2) / 2.0));
  p.equal(y.trace(), t);
  p.psd(y - MatExpr(j));
  p.minimize(t);
  const auto sol = p.solve();
  REQUIRE(sol.status == Status::Optimal);
  return std::log2(sol.objective);
}

// max over normalized PPT Choi states of Tr[P Y] for a projector P
double ppt_max_overlap(const CMatrix& proj) {
  using namespace conic;
  Problem p;
  auto y = p.hermitian("Y", 4);
  p.psd(LinearMap::partial_transpose({2, 2}, {0})(y));
  p.equal(LinearMap::partial_trace({2, 2}, {1})(y), MatExpr(CMatrix(CMatrix::Identity(2, 2) / 2.0)));
  p.maximize(y.inner(proj));
  const auto sol = p.solve();
  REQUIRE(sol.status == Status::Optimal);
  return sol.objective;
}

CMatrix support_projector(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CMatrix p = CMatrix::Zero(h.rows(), h.cols());
  for (int i = 0; i < h.rows(); ++i)
    if (es.eigenvalues()(i) > 1e-10) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return p;
}

double h2(const std::vector<double>& p) {
  double s = 0;
  for (double x : p)
    if (x > 0) s -= x * std::log2(x);
  return s;
}

}  // namespace

TEST_CASE("measure tokens") {
  CHECK(parse_measure("lr") == Measure::LR);
  CHECK(parse_measure("MAX") == Measure::Max);
  CHECK(parse_measure("htilde") == Measure::Htilde);
  CHECK(parse_measure("Hhat") == Measure::Hhat);
  CHECK_THROWS_AS(parse_measure("dmin"), Error);
}

TEST_CASE("diamond distance") {
  const auto id = channels::identity(2);
  CHECK(diamond_distance(id, id) == doctest::Approx(0.0));
  CHECK(diamond_distance(id, channels::unitary(channels::pauli_z())) == doctest::Approx(1.0).epsilon(1e-6));
  for (double p : {0.1, 0.5, 1.0}) {
    const auto dep = channels::depolarizing(2, p);
    // the maximally entangled input attains the optimum for this covariant pair
    const double oracle = 0.5 * trace_norm(id.choi().matrix() - dep.choi().matrix());
    CHECK(oracle == doctest::Approx(0.75 * p).epsilon(1e-12));
    CHECK(std::abs(diamond_distance(id, dep) - oracle) < 1e-6);
  }
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_channel(rng, 2, 2, 2);
    const auto b = random_channel(rng, 2, 2, 2);
    const double d = diamond_distance(a, b);
    CHECK(std::abs(d - diamond_distance(b, a)) < 1e-6);
    CHECK(d <= 1.0);
    CHECK(d >= 0.5 * trace_norm(a.choi().matrix() - b.choi().matrix()) - 1e-7);
    // any input with ancilla gives a lower bound
    const CMatrix psi = DensityMatrix::pure(haar_pure_state(rng, 4)).matrix();
    const double probe = trace_distance(apply_channel(a.choi(), DensityMatrix(psi), 2),
                                        apply_channel(b.choi(), DensityMatrix(psi), 2));
    CHECK(d >= probe - 1e-7);
  }
}

TEST_CASE("state hypothesis testing") {
  Rng rng(8);
  const CMatrix rho = random_density(rng, 3);
  for (double eps : {0.0, 0.1, 0.3}) {
    CHECK(dh_state(rho, rho, eps) == doctest::Approx(-std::log2(1 - eps)).epsilon(1e-6));
    CHECK(dh_state_np(rho, rho, eps) == doctest::Approx(-std::log2(1 - eps)).epsilon(1e-6));
  }
  const CMatrix zero = DensityMatrix::pure(CVector::Unit(2, 0)).matrix();
  const CMatrix one = DensityMatrix::pure(CVector::Unit(2, 1)).matrix();
  CHECK(std::isinf(dh_state(zero, one, 0.0)));
  CHECK(std::isinf(dh_state_np(zero, one, 0.0)));
  CHECK(dh_state(zero, CMatrix::Identity(2, 2) / 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(dh_state(zero, zero, 1.0), Error);
  CHECK_THROWS_AS(dh_state(zero, zero, -0.1), Error);

  // Lagrange-dual route against the semidefinite program
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 3;
    const CMatrix r = random_density(rng, d, 1 + trial % d);
    const CMatrix s = random_density(rng, d);
    for (double eps : {0.0, 0.05, 0.2}) {
      CAPTURE(trial);
      CAPTURE(eps);
      CHECK(std::abs(dh_state(r, s, eps) - dh_state_np(r, s, eps)) < 1e-5);
    }
  }
}

TEST_CASE("robustness measures on free channels vanish") {
  for (Theory th : all_theories()) {
    const TheorySpec s = make_theory(th, 2, 2);
    const auto dep = channels::fully_depolarizing(2, 2).choi();
    CAPTURE(token(th));
    CHECK(log_robustness(dep, s).value == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(dmax(dep, s).value < 1e-6);
    CHECK(dh_choi(dep, s).value < 1e-6);
    CHECK(dh_unassisted(dep, s, 0.0, quick()).value < 1e-6);
    const auto iv = dh_channel_interval(dep, s, 0.0, quick());
    CHECK(iv.lo.value < 1e-6);
    CHECK(iv.hi.value < 1e-6);
  }
}

TEST_CASE("identity channel constants") {
  const auto id = channels::identity(2).choi();
  const TheorySpec qc = registered_theory(Theory::QuantumCapacity);
  CHECK(log_robustness(id, qc).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(dmax(id, qc).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(dh_choi(id, qc).value == doctest::Approx(1.0).epsilon(1e-6));
  const auto iv = dh_channel_interval(id, qc, 0.0, quick());
  CHECK(iv.lo.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(iv.hi.value == doctest::Approx(1.0).epsilon(1e-6));

  const TheorySpec purity = registered_theory(Theory::Purity);
  CHECK(dmax(id, purity).value == doctest::Approx(2.0).epsilon(1e-6));
  const auto lr = log_robustness(id, purity);
  CHECK(lr.infinite());
  CHECK(lr.dualCertificate.has_value());
  // without an ancilla the only free channel outputs I/2, so every pure input scores log2 2
  const auto hh = dh_unassisted(id, purity, 0.0, quick());
  CHECK(hh.value == doctest::Approx(1.0).epsilon(1e-6));

  const TheorySpec cc = registered_theory(Theory::ClassicalCapacity);
  CHECK(dmax(id, cc).value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("coherence and preparation targets") {
  const TheorySpec had = registered_theory(Theory::Coherence, "Had");
  const auto u = had.target->choi();
  CHECK(dmax(u, had).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(log_robustness(u, had).infinite());
  CHECK(dh_choi(u, had).value == doctest::Approx(1.0).epsilon(1e-6));

  const TheorySpec gp = registered_theory(Theory::Coherence, "G+");
  CHECK(dh_unassisted(gp.target->choi(), gp).value == doctest::Approx(1.0).epsilon(1e-6));

  const TheorySpec ent = registered_theory(Theory::Entanglement, "GPhi+");
  const auto g = ent.target->choi();
  CHECK(dh_choi(g, ent).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(log_robustness(g, ent).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("depolarizing channel against direct programs") {
  const TheorySpec qc = make_theory(Theory::QuantumCapacity, 2, 2);
  const auto dep = channels::depolarizing(2, 0.5).choi();
  const double oracle = ppt_generalized_robustness(dep.matrix());
  // isotropic closed form: 1 + R = 2F with F the singlet fraction 5/8
  CHECK(oracle == doctest::Approx(std::log2(1.25)).epsilon(1e-6));
  CHECK(dmax(dep, qc).value == doctest::Approx(oracle).epsilon(1e-6));

  const auto d25 = channels::depolarizing(2, 0.25).choi();
  const auto iv = dh_channel_interval(d25, qc, 0.0, quick());
  CHECK(iv.hi.value == doctest::Approx(ppt_generalized_robustness(d25.matrix())).epsilon(1e-6));
  // full-rank Choi: the zero-error test must accept everything
  CHECK(iv.lo.value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(iv.lo.value <= iv.hi.value + 1e-7);

  // rank-deficient Choi: compare the Choi-input measure with a direct overlap program
  const auto amp = ChannelSpec::from_kraus(
      {CMatrix((CMatrix(2, 2) << 1, 0, 0, std::sqrt(0.7)).finished()),
       CMatrix((CMatrix(2, 2) << 0, std::sqrt(0.3), 0, 0).finished())},
      2, 2);
  const double direct = -std::log2(ppt_max_overlap(support_projector(amp.choi().matrix())));
  CHECK(dh_choi(amp.choi(), qc).value == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("smoothing never increases the diamond-smoothed measures") {
  const TheorySpec qc = make_theory(Theory::QuantumCapacity, 2, 2);
  const TheorySpec coh = make_theory(Theory::Coherence, 2, 2);
  for (double p : {0.0, 0.3}) {
    const auto ch = channels::depolarizing(2, p).choi();
    double lastLr = 1e9, lastMax = 1e9, lastCoh = 1e9;
    for (double eps : {0.0, 0.01, 0.05, 0.1}) {
      const double lr = log_robustness(ch, qc, eps).value;
      const double mx = dmax(ch, qc, eps).value;
      const double mc = dmax(ch, coh, eps).value;
      CHECK(lr <= lastLr + 1e-7);
      CHECK(mx <= lastMax + 1e-7);
      CHECK(mc <= lastCoh + 1e-7);
      lastLr = lr;
      lastMax = mx;
      lastCoh = mc;
    }
  }
  // the identity at radius 0.05 sits strictly below its unsmoothed value
  const auto id = channels::identity(2).choi();
  CHECK(log_robustness(id, qc, 0.05).value < 1.0);
}

TEST_CASE("ordering chain on random channels at zero smoothing") {
  Rng rng(101);
  for (Theory th : all_theories()) {
    const TheorySpec s = make_theory(th, 2, 2);
    for (int trial = 0; trial < 3; ++trial) {
      const auto n = random_channel(rng, 2, 2, 1 + trial % 2).choi();
      CAPTURE(token(th));
      const auto lr = log_robustness(n, s);
      const auto mx = dmax(n, s);
      const auto iv = dh_channel_interval(n, s, 0.0, quick());
      const auto ht = dh_choi(n, s);
      const auto hh = dh_unassisted(n, s, 0.0, quick());
      if (!lr.infinite()) CHECK(lr.value >= mx.value - 1e-6);
      CHECK(mx.value >= iv.hi.value - 1e-6);
      CHECK(iv.hi.value >= iv.lo.value - 1e-6);
      CHECK(iv.lo.value >= std::max(ht.value, hh.value) - 1e-6);
    }
  }
}

TEST_CASE("faithfulness of the max-relative entropy") {
  Rng rng(55);
  for (Theory th : all_theories()) {
    const TheorySpec s = make_theory(th, 2, 2);
    for (int trial = 0; trial < 3; ++trial) {
      const auto n = random_channel(rng, 2, 2, 2).choi();
      CAPTURE(token(th));
      const bool zero = dmax(n, s).value < 1e-6;
      CHECK(zero == is_free(n, s).free);
    }
  }
}

TEST_CASE("fidelity measures") {
  const TheorySpec coh = registered_theory(Theory::Coherence, "Had");
  const auto f = fidelity_measures(coh.target->choi(), coh, quick());
  CHECK(f.unitaryInput);
  CHECK(f.fidelityTilde == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(f.fidelity <= f.fidelityTilde + 1e-6);
  const auto x = fidelity_measures(channels::unitary(channels::pauli_x()).choi(), coh, quick());
  CHECK(x.fidelityTilde == doctest::Approx(1.0).epsilon(1e-6));

  Rng rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    const auto u = channels::unitary(haar_unitary(rng, 2)).choi();
    const double ft = fidelity_measures(u, coh, quick()).fidelityTilde;
    CHECK(-std::log2(ft) == doctest::Approx(dh_choi(u, coh).value).epsilon(1e-5));
  }
  const TheorySpec ent = registered_theory(Theory::Entanglement, "CNOT");
  const auto cn = ent.target->choi();
  CHECK(-std::log2(fidelity_measures(cn, ent, quick()).fidelityTilde) ==
        doctest::Approx(dh_choi(cn, ent).value).epsilon(1e-5));
}

TEST_CASE("channel entropy") {
  CHECK(channel_entropy(channels::fully_depolarizing(2, 2).choi()).value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(channel_entropy(channels::identity(2).choi()).value == doctest::Approx(2.0).epsilon(1e-6));
  for (double p : {0.2, 0.6}) {
    const double oracle = 2.0 - h2({1 - 0.75 * p, p / 4, p / 4, p / 4});
    CHECK(channel_entropy(channels::depolarizing(2, p).choi()).value == doctest::Approx(oracle).epsilon(1e-5));
  }
  Rng rng(4);
  const auto n = random_channel(rng, 2, 2, 2).choi();
  const auto e = channel_entropy(n);
  // the maximally mixed input is one candidate
  const double atPhi = 1.0 + 1.0 - entropy(n.matrix());
  CHECK(e.value >= atPhi - 1e-9);
}

TEST_CASE("regularized constants") {
  const TheorySpec purity = registered_theory(Theory::Purity);
  const auto t = purity.target->choi();
  for (int n : {1, 2}) {
    const auto r = regularized_m(Measure::Max, t, purity, n);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
    REQUIRE(r.analytic.has_value());
    CHECK(r.agrees);
  }
  const TheorySpec qc = registered_theory(Theory::QuantumCapacity);
  CHECK(regularized_m(Measure::LR, qc.target->choi(), qc, 2).value == doctest::Approx(1.0).epsilon(1e-5));
  const TheorySpec ent = registered_theory(Theory::Entanglement, "GPhi+");
  CHECK(regularized_m(Measure::LR, ent.target->choi(), ent, 1).value == doctest::Approx(1.0).epsilon(1e-6));
  const TheorySpec cc = registered_theory(Theory::ClassicalCapacity);
  CHECK(regularized_m(Measure::Max, cc.target->choi(), cc, 1).value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("dimension checks") {
  const TheorySpec qc = make_theory(Theory::QuantumCapacity, 2, 2);
  CHECK_THROWS_AS(dmax(channels::identity(3).choi(), qc), Error);
  try {
    regularized_m(Measure::Max, channels::identity(2).choi(), qc, 3);
    FAIL("expected guard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionGuardExceeded);
  }
}

TEST_CASE("csv rows") {
  const TheorySpec qc = registered_theory(Theory::QuantumCapacity);
  const auto r = log_robustness(qc.target->choi(), qc);
  const std::string row = monotone_csv_row(qc, r);
  CHECK(row.rfind("qc,LR,0,", 0) == 0);
  CHECK(row.find(",exact,0,") != std::string::npos);
  CHECK(monotone_csv_header() == "theory,measure,epsilon,value,boundKind,relaxationFlag,gap");
}
