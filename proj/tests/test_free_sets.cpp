#include <cmath>

#include "chanres/free_sets.hpp"
#include "doctest.h"

using namespace chanres;

namespace {

// Measure-and-prepare channel from a random POVM; its Choi is separable by construction.
ChoiMatrix measure_prepare(Rng& rng, int dA, int dB, int outcomes) {
  std::vector<CMatrix> a;
  CMatrix s = CMatrix::Zero(dA, dA);
  for (int k = 0; k < outcomes; ++k) {
    const CMatrix g = ginibre(rng, dA, dA);
    a.push_back(g * g.adjoint());
    s += a.back();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  const CMatrix sInvHalf = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                           es.eigenvectors().adjoint();
  CMatrix j = CMatrix::Zero(dA * dB, dA * dB);
  for (int k = 0; k < outcomes; ++k) {
    const CMatrix m = sInvHalf * a[static_cast<std::size_t>(k)] * sInvHalf;
    j += kron(m.transpose(), random_density(rng, dB)) / static_cast<double>(dA);
  }
  return ChoiMatrix(dA, dB, hermitian_part(j));
}

ChoiMatrix mix(const ChoiMatrix& x, const ChoiMatrix& y, double t) {
  return ChoiMatrix(x.dim_in(), x.dim_out(), (1 - t) * x.matrix() + t * y.matrix());
}

}  // namespace

TEST_CASE("theory tokens round trip") {
  for (Theory t : all_theories()) CHECK(parse_theory(token(t)) == t);
  CHECK_THROWS_AS(parse_theory("magic"), Error);
}

TEST_CASE("registry") {
  for (const auto& [id, name] : registered_targets()) {
    const TheorySpec s = registered_theory(id, name);
    REQUIRE(s.target.has_value());
    CHECK(s.target->dim_in() == s.dimIn);
    CHECK(s.target->dim_out() == s.dimOut);
    CHECK_FALSE(s.publishedConstants.empty());
    CHECK(s.robustnessFinite == (id == Theory::QuantumCapacity || id == Theory::Entanglement));
  }
  CHECK(registered_theory(Theory::Entanglement).targetName == "CNOT");
  CHECK(registered_theory(Theory::NonUniformity).targetKind == TargetKind::Preparation);
  CHECK_THROWS_AS(registered_theory(Theory::Purity, "CNOT"), Error);
  CHECK_THROWS_AS(make_theory(Theory::Entanglement, 3, 3), Error);
}

TEST_CASE("bipartition bookkeeping") {
  const Bipartition b = default_bipartition(4, 4);
  CHECK(b.party_dim(1) == 4);
  CHECK(b.party_dim(2) == 4);
  CHECK(b.party2_factors() == std::vector<int>{1, 3});
  const Bipartition b2 = b.power(2);
  CHECK(b2.dim_in() == 16);
  CHECK(b2.party2_factors() == std::vector<int>{1, 3, 5, 7});
  const TheorySpec s = make_theory(Theory::Entanglement, 4, 4).power(2);
  CHECK(s.dimIn == 16);
  CHECK(s.relaxation_flag());
  CHECK_FALSE(make_theory(Theory::QuantumCapacity, 2, 2).relaxation_flag());
  CHECK(make_theory(Theory::QuantumCapacity, 2, 2).power(2).relaxation_flag());
}

TEST_CASE("fully depolarizing channel is free in every theory") {
  for (const auto& [id, name] : registered_targets()) {
    const TheorySpec s = registered_theory(id, name);
    const auto n = channels::fully_depolarizing(s.dimIn, s.dimOut);
    CHECK(FreeCone(s).violation(n.choi().matrix()) < 1e-12);
    const auto m = is_free(n.choi(), s);
    CHECK(m.free);
    CHECK(m.residual < 1e-6);
  }
}

TEST_CASE("quantum capacity: identity is far from free") {
  const TheorySpec s = registered_theory(Theory::QuantumCapacity);
  const auto m = is_free(channels::identity(2).choi(), s);
  CHECK_FALSE(m.free);
  CHECK(m.residual >= 0.4);
  // Werner state with singlet fraction 1/2 sits on the PPT boundary
  CHECK(m.residual == doctest::Approx(0.5).epsilon(1e-5));
  CHECK_FALSE(m.relaxed);
}

TEST_CASE("purity rejects the identity") {
  const TheorySpec s = registered_theory(Theory::Purity);
  const auto m = is_free(channels::identity(2).choi(), s);
  CHECK_FALSE(m.free);
  // trace distance between Phi+ and I/4
  CHECK(m.residual == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("coherence: dephasing and X are free, Hadamard is not") {
  const TheorySpec s = make_theory(Theory::Coherence, 2, 2);
  auto blocks_diagonal = [](const CMatrix& j) {
    // oracle: N(|a><a|) = 2 * block (a,a) must be diagonal
    double off = 0.0;
    for (int a = 0; a < 2; ++a) off = std::max(off, std::abs(j(2 * a, 2 * a + 1)));
    return off < 1e-12;
  };
  const auto deph = channels::dephasing(2).choi();
  const auto x = channels::unitary(channels::pauli_x()).choi();
  const auto had = channels::unitary(channels::hadamard()).choi();
  CHECK(blocks_diagonal(deph.matrix()));
  CHECK(blocks_diagonal(x.matrix()));
  CHECK_FALSE(blocks_diagonal(had.matrix()));
  CHECK(is_free(deph, s).free);
  CHECK(is_free(x, s).free);
  CHECK_FALSE(is_free(had, s).free);
}

TEST_CASE("entanglement rejects CNOT") {
  const TheorySpec s = registered_theory(Theory::Entanglement, "CNOT");
  CHECK(FreeCone(s).violation(channels::unitary(channels::cnot()).choi().matrix()) > 0.1);
  const auto m = is_free(channels::unitary(channels::cnot()).choi(), s);
  CHECK_FALSE(m.free);
  CHECK(m.relaxed);
  const auto local = channels::unitary(kron(channels::hadamard(), channels::pauli_x())).choi();
  CHECK(is_free(local, s).free);
}

TEST_CASE("non-uniformity and classical capacity examples") {
  const TheorySpec nu = make_theory(Theory::NonUniformity, 2, 2);
  CHECK(is_free(channels::identity(2).choi(), nu).free);
  const CMatrix zero = DensityMatrix::pure(CVector::Unit(2, 0)).matrix();
  CHECK_FALSE(is_free(channels::replacement(2, zero).choi(), nu).free);
  const TheorySpec cc = make_theory(Theory::ClassicalCapacity, 2, 2);
  CHECK(is_free(channels::replacement(2, zero).choi(), cc).free);
  CHECK_FALSE(is_free(channels::dephasing(2).choi(), cc).free);
}

TEST_CASE("free sets are convex") {
  Rng rng(21);
  struct Case {
    TheorySpec spec;
    ChoiMatrix other;
  };
  const CMatrix sigma = random_density(rng, 2);
  std::vector<Case> cases{
      {make_theory(Theory::ClassicalCapacity, 2, 2), channels::replacement(2, sigma).choi()},
      {make_theory(Theory::QuantumCapacity, 2, 2), measure_prepare(rng, 2, 2, 3)},
      {make_theory(Theory::NonUniformity, 2, 2), channels::unitary(haar_unitary(rng, 2)).choi()},
      {make_theory(Theory::Coherence, 2, 2), channels::dephasing(2).choi()},
      {make_theory(Theory::Entanglement, 2, 2), measure_prepare(rng, 2, 2, 2)},
  };
  for (const auto& c : cases) {
    CAPTURE(token(c.spec.id));
    const auto dep = channels::fully_depolarizing(2, 2).choi();
    CHECK(is_free(c.other, c.spec).free);
    for (double t : {0.25, 0.5, 0.75}) CHECK(is_free(mix(dep, c.other, t), c.spec).free);
  }
}

TEST_CASE("PPT membership matches separability for qubit Choi states") {
  // For 2x2 Choi states PPT is equivalent to separability; the oracle is the
  // closed-form mixing threshold with the fully depolarizing channel.
  Rng rng(77);
  const TheorySpec s = make_theory(Theory::QuantumCapacity, 2, 2);
  const auto dep = channels::fully_depolarizing(2, 2).choi();
  const int dims[2] = {2, 2};
  const int which[1] = {0};
  int agree = 0, total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto j = random_channel(rng, 2, 2, 1 + trial % 3).choi();
    const double e = min_eigenvalue(partial_transpose(j.matrix(), dims, which));
    if (e >= 0) {
      CHECK(is_free(j, s).free);
      ++agree;
      ++total;
      continue;
    }
    // eigenvalue of PT((1-t)J + t I/4) is at least (1-t)e + t/4, with equality on the same eigenvector
    const double t = -e / (0.25 - e);
    const bool below = is_free(mix(j, dep, std::max(0.0, t - 0.05)), s).free;
    const bool above = is_free(mix(j, dep, std::min(1.0, t + 0.05)), s).free;
    CHECK_FALSE(below);
    CHECK(above);
    agree += (!below && above) ? 1 : 0;
    ++total;
  }
  CHECK(agree == total);
  // measure-and-prepare channels are separable, so always free
  for (int trial = 0; trial < 10; ++trial) CHECK(is_free(measure_prepare(rng, 2, 2, 2 + trial % 3), s).free);
}
