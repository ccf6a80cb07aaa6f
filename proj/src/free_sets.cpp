#include "chanres/free_sets.hpp"

#include <algorithm>
#include <cmath>

namespace chanres {

using conic::LinearMap;
using conic::MatExpr;
using conic::ScalarExpr;

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

int prod(const std::vector<int>& v) {
  int p = 1;
  for (int x : v) p *= x;
  return p;
}

}  // namespace

std::string_view token(Theory theory) {
  switch (theory) {
    case Theory::Purity: return "purity";
    case Theory::ClassicalCapacity: return "cc";
    case Theory::QuantumCapacity: return "qc";
    case Theory::NonUniformity: return "nu";
    case Theory::Coherence: return "coh";
    case Theory::Entanglement: return "ent";
  }
  return "?";
}

std::string_view display_name(Theory theory) {
  switch (theory) {
    case Theory::Purity: return "Purity";
    case Theory::ClassicalCapacity: return "ClassicalCapacity";
    case Theory::QuantumCapacity: return "QuantumCapacity";
    case Theory::NonUniformity: return "NonUniformity";
    case Theory::Coherence: return "Coherence";
    case Theory::Entanglement: return "Entanglement";
  }
  return "?";
}

Theory parse_theory(std::string_view t) {
  for (Theory th : all_theories())
    if (token(th) == t) return th;
  throw Error(ErrorCode::ParseError, "unknown theory token '" + std::string(t) + "'");
}

std::vector<Theory> all_theories() {
  return {Theory::Purity,        Theory::ClassicalCapacity, Theory::QuantumCapacity,
          Theory::NonUniformity, Theory::Coherence,         Theory::Entanglement};
}

// ---------------------------------------------------------------------------

int Bipartition::dim_in() const { return prod(inDims); }
int Bipartition::dim_out() const { return prod(outDims); }

int Bipartition::party_dim(int party) const {
  int d = 1;
  for (std::size_t i = 0; i < inDims.size(); ++i)
    if (inParty[i] == party) d *= inDims[i];
  for (std::size_t i = 0; i < outDims.size(); ++i)
    if (outParty[i] == party) d *= outDims[i];
  return d;
}

std::vector<int> Bipartition::factor_dims() const {
  std::vector<int> f = inDims;
  f.insert(f.end(), outDims.begin(), outDims.end());
  return f;
}

std::vector<int> Bipartition::party2_factors() const {
  std::vector<int> idx;
  for (std::size_t i = 0; i < inParty.size(); ++i)
    if (inParty[i] == 2) idx.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < outParty.size(); ++i)
    if (outParty[i] == 2) idx.push_back(static_cast<int>(inParty.size() + i));
  return idx;
}

Bipartition Bipartition::power(int n) const {
  Bipartition b;
  for (int k = 0; k < n; ++k) {
    b.inDims.insert(b.inDims.end(), inDims.begin(), inDims.end());
    b.inParty.insert(b.inParty.end(), inParty.begin(), inParty.end());
    b.outDims.insert(b.outDims.end(), outDims.begin(), outDims.end());
    b.outParty.insert(b.outParty.end(), outParty.begin(), outParty.end());
  }
  return b;
}

Bipartition default_bipartition(int dimIn, int dimOut) {
  if (dimIn == 4 && dimOut == 4) return {{2, 2}, {1, 2}, {2, 2}, {1, 2}};
  if (dimIn == 1 && dimOut == 4) return {{1, 1}, {1, 2}, {2, 2}, {1, 2}};
  if (dimIn == 2 && dimOut == 2) return {{2}, {1}, {2}, {2}};
  throw Error(ErrorCode::UnsupportedDims, "entanglement theory needs an explicit bipartition for " +
                                              std::to_string(dimIn) + " -> " + std::to_string(dimOut));
}

// ---------------------------------------------------------------------------

bool TheorySpec::relaxation_flag() const {
  if (id == Theory::QuantumCapacity) return dimIn * dimOut > 6;
  if (id == Theory::Entanglement) {
    const int a = bipartition->party_dim(1), b = bipartition->party_dim(2);
    return a > 1 && b > 1 && a * b > 6;
  }
  return false;
}

TheorySpec TheorySpec::power(int n) const {
  require(n >= 1, ErrorCode::InvalidArgument, "power requires n >= 1");
  TheorySpec s;
  s.id = id;
  s.dimIn = static_cast<int>(std::lround(std::pow(dimIn, n)));
  s.dimOut = static_cast<int>(std::lround(std::pow(dimOut, n)));
  if (bipartition) s.bipartition = bipartition->power(n);
  s.relaxation = relaxation;
  s.robustnessFinite = robustnessFinite;
  return s;
}

TheorySpec TheorySpec::with_dims(int dIn, int dOut) const {
  std::optional<Bipartition> cut;
  if (id == Theory::Entanglement) cut = default_bipartition(dIn, dOut);
  TheorySpec s = make_theory(id, dIn, dOut, cut);
  s.targetName = targetName;
  s.target = target;
  s.targetKind = targetKind;
  s.analyticM = analyticM;
  s.publishedConstants = publishedConstants;
  return s;
}

TheorySpec TheorySpec::with_dims(int dIn, int dOut, const Bipartition& cut) const {
  TheorySpec s = with_dims(dIn, dOut);
  if (id == Theory::Entanglement) {
    require(cut.dim_in() == dIn && cut.dim_out() == dOut, ErrorCode::DimensionMismatch,
            "bipartition does not match channel dims");
    s.bipartition = cut;
  }
  return s;
}

TheorySpec make_theory(Theory id, int dimIn, int dimOut, std::optional<Bipartition> cut) {
  require(dimIn >= 1 && dimOut >= 1, ErrorCode::InvalidArgument, "dimensions must be positive");
  TheorySpec s;
  s.id = id;
  s.dimIn = dimIn;
  s.dimOut = dimOut;
  s.robustnessFinite = id == Theory::QuantumCapacity || id == Theory::Entanglement;
  if (id == Theory::QuantumCapacity || id == Theory::Entanglement) s.relaxation = Relaxation::Ppt;
  if (id == Theory::Entanglement) {
    s.bipartition = cut ? *cut : default_bipartition(dimIn, dimOut);
    require(s.bipartition->dim_in() == dimIn && s.bipartition->dim_out() == dimOut,
            ErrorCode::DimensionMismatch, "bipartition does not match channel dims");
    require(s.bipartition->inParty.size() == s.bipartition->inDims.size() &&
                s.bipartition->outParty.size() == s.bipartition->outDims.size(),
            ErrorCode::InvalidArgument, "bipartition party labels do not match factors");
  }
  return s;
}

ChannelSpec target_channel(std::string_view name) {
  if (name == "I2") return channels::identity(2);
  if (name == "Had") return channels::unitary(channels::hadamard());
  if (name == "CNOT") return channels::unitary(channels::cnot());
  if (name == "G2") return channels::preparation(DensityMatrix::pure(CVector::Unit(2, 0)).matrix());
  if (name == "G+") {
    CVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return channels::preparation(DensityMatrix::pure(plus).matrix());
  }
  if (name == "GPhi+") return channels::preparation(max_entangled(2));
  throw Error(ErrorCode::MissingTarget, "unknown target '" + std::string(name) + "'");
}

std::vector<std::pair<Theory, std::string>> registered_targets() {
  return {{Theory::Purity, "I2"},        {Theory::ClassicalCapacity, "I2"}, {Theory::QuantumCapacity, "I2"},
          {Theory::NonUniformity, "G2"}, {Theory::Coherence, "Had"},        {Theory::Coherence, "G+"},
          {Theory::Entanglement, "CNOT"}, {Theory::Entanglement, "GPhi+"}};
}

TheorySpec registered_theory(Theory id, std::string_view targetName) {
  std::string name(targetName);
  if (name.empty()) {
    for (const auto& [t, n] : registered_targets())
      if (t == id) {
        name = n;
        break;
      }
  }
  bool known = false;
  for (const auto& [t, n] : registered_targets()) known = known || (t == id && n == name);
  require(known, ErrorCode::MissingTarget,
          "target '" + name + "' is not registered for theory " + std::string(token(id)));

  const ChannelSpec target = target_channel(name);
  TheorySpec s = make_theory(id, target.dim_in(), target.dim_out());
  s.targetName = name;
  s.target = target;
  s.targetKind = target.dim_in() == 1 ? TargetKind::Preparation : TargetKind::Unitary;

  auto set = [&](std::map<std::string, double>& m, std::initializer_list<const char*> keys, double v) {
    for (const char* k : keys) m[k] = v;
  };
  switch (id) {
    case Theory::Purity:
    case Theory::ClassicalCapacity:
      set(s.publishedConstants, {"max", "H", "Htilde"}, 2.0);
      s.analyticM = s.publishedConstants;
      break;
    case Theory::QuantumCapacity:
      set(s.publishedConstants, {"LR", "H", "Htilde"}, 1.0);
      s.analyticM = s.publishedConstants;
      break;
    case Theory::NonUniformity:
      set(s.publishedConstants, {"max", "Htilde"}, 1.0);
      s.analyticM = s.publishedConstants;
      // preparation target: all hypothesis-testing variants coincide
      set(s.analyticM, {"H", "Hhat"}, 1.0);
      break;
    case Theory::Coherence:
      set(s.publishedConstants, {"max", "H", "Htilde"}, 1.0);
      s.analyticM = s.publishedConstants;
      if (name == "G+") set(s.analyticM, {"Hhat"}, 1.0);
      break;
    case Theory::Entanglement:
      if (name == "CNOT") {
        set(s.publishedConstants, {"LR", "H", "Htilde"}, 2.0);
        // not attained by the implemented free set; rates use computed values
      } else {
        set(s.publishedConstants, {"LR", "H", "Htilde"}, 1.0);
        s.analyticM = s.publishedConstants;
        set(s.analyticM, {"Hhat"}, 1.0);
      }
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct Maps {
  std::vector<int> dims;  // Choi factor dims for partial operations
  std::vector<int> ptWhich;
};

Maps maps_for(const TheorySpec& s) {
  Maps m;
  if (s.id == Theory::Entanglement) {
    m.dims = s.bipartition->factor_dims();
    m.ptWhich = s.bipartition->party2_factors();
  } else {
    m.dims = {s.dimIn, s.dimOut};
    m.ptWhich = {0};
  }
  return m;
}

// Entries that must vanish for the coherence cone: off-diagonal elements of
// each diagonal input block.
std::vector<std::pair<int, int>> coherence_entries(int dA, int dB) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b)
      for (int bp = b + 1; bp < dB; ++bp) e.emplace_back(a * dB + b, a * dB + bp);
  return e;
}

}  // namespace

std::vector<conic::ConstraintId> FreeCone::impose(conic::Problem& p, const MatExpr& x) const {
  std::vector<conic::ConstraintId> ids;
  ids.push_back(p.psd(x));
  auto rest = impose_linear_and_theory(p, x);
  ids.insert(ids.end(), rest.begin(), rest.end());
  return ids;
}

std::vector<conic::ConstraintId> FreeCone::impose_linear_and_theory(conic::Problem& p, const MatExpr& x) const {
  const int dA = spec_.dimIn, dB = spec_.dimOut, d = dA * dB;
  require(x.rows() == d && x.cols() == d, ErrorCode::DimensionMismatch, "free cone variable has wrong size");
  std::vector<conic::ConstraintId> ids;
  const ScalarExpr tr = x.trace();

  // trace-preservation tie Tr_B X = Tr[X] pi_A
  if (dA > 1) {
    const auto trB = LinearMap::partial_trace({dA, dB}, {1});
    ids.push_back(p.equal(trB(x), conic::scalar_times(tr, CMatrix::Identity(dA, dA) / dA)));
  }

  switch (spec_.id) {
    case Theory::Purity:
      ids.push_back(p.equal(x, conic::scalar_times(tr, CMatrix::Identity(d, d) / d)));
      break;
    case Theory::ClassicalCapacity: {
      const auto trA = LinearMap::partial_trace({dA, dB}, {0});
      const auto lift = LinearMap::kron(CMatrix::Identity(dA, dA) / dA, dB, dB, CMatrix::Identity(1, 1));
      ids.push_back(p.equal(x, lift(trA(x))));
      break;
    }
    case Theory::QuantumCapacity:
    case Theory::Entanglement: {
      const Maps m = maps_for(spec_);
      if (!m.ptWhich.empty()) ids.push_back(p.psd(LinearMap::partial_transpose(m.dims, m.ptWhich)(x)));
      break;
    }
    case Theory::NonUniformity: {
      const auto trA = LinearMap::partial_trace({dA, dB}, {0});
      ids.push_back(p.equal(trA(x), conic::scalar_times(tr, CMatrix::Identity(dB, dB) / dB)));
      break;
    }
    case Theory::Coherence: {
      const auto entries = coherence_entries(dA, dB);
      if (entries.empty()) break;
      const int k = static_cast<int>(entries.size());
      const auto pick = LinearMap::from_function(d, d, [&](const CMatrix& m) {
        CMatrix out(k, 1);
        for (int i = 0; i < k; ++i) out(i, 0) = m(entries[i].first, entries[i].second);
        return out;
      });
      ids.push_back(p.equal(pick(x), MatExpr(CMatrix::Zero(k, 1))));
      break;
    }
  }
  return ids;
}

double FreeCone::violation(const CMatrix& x) const {
  const int dA = spec_.dimIn, dB = spec_.dimOut, d = dA * dB;
  require(x.rows() == d && x.cols() == d, ErrorCode::DimensionMismatch, "matrix has wrong size");
  const double tr = x.trace().real();
  double v = std::max(0.0, -min_eigenvalue(hermitian_part(x)));
  const int ab[2] = {dA, dB};
  const int t0[1] = {0};
  const int t1[1] = {1};
  if (dA > 1)
    v = std::max(v, (partial_trace(x, ab, t1) - tr * CMatrix::Identity(dA, dA) / dA).cwiseAbs().maxCoeff());
  switch (spec_.id) {
    case Theory::Purity:
      v = std::max(v, (x - tr * CMatrix::Identity(d, d) / d).cwiseAbs().maxCoeff());
      break;
    case Theory::ClassicalCapacity:
      v = std::max(v, (x - kron(CMatrix::Identity(dA, dA) / dA, partial_trace(x, ab, t0))).cwiseAbs().maxCoeff());
      break;
    case Theory::QuantumCapacity:
    case Theory::Entanglement: {
      const Maps m = maps_for(spec_);
      if (!m.ptWhich.empty())
        v = std::max(v, -min_eigenvalue(hermitian_part(partial_transpose(x, m.dims, m.ptWhich))));
      break;
    }
    case Theory::NonUniformity:
      v = std::max(v, (partial_trace(x, ab, t0) - tr * CMatrix::Identity(dB, dB) / dB).cwiseAbs().maxCoeff());
      break;
    case Theory::Coherence:
      for (const auto& [i, j] : coherence_entries(dA, dB)) v = std::max(v, std::abs(x(i, j)));
      break;
  }
  return v;
}

FreeCone free_cone(const TheorySpec& spec) { return FreeCone(spec); }

Membership is_free(const ChoiMatrix& choi, const TheorySpec& spec, double tol) {
  require(choi.dim_in() == spec.dimIn && choi.dim_out() == spec.dimOut, ErrorCode::DimensionMismatch,
          "channel dims do not match theory");
  const FreeCone cone(spec);
  const int d = choi.dim();
  conic::Problem p;
  auto x = p.hermitian("X", d);
  cone.impose_linear_and_theory(p, x);
  p.equal(x.trace(), ScalarExpr(1.0));
  auto pos = p.hermitian("P", d);
  p.psd(pos - MatExpr(choi.matrix()) + x);
  p.minimize(pos.trace());
  const auto sol = p.solve();
  Membership m;
  m.status = sol.status;
  m.relaxed = spec.relaxation_flag();
  if (sol.status == conic::Status::Optimal || sol.status == conic::Status::Inaccurate) {
    m.residual = std::max(0.0, sol.objective);
    m.free = m.residual <= tol;
  } else {
    throw Error(ErrorCode::SolverFailure, std::string("membership program ended ") + conic::to_string(sol.status));
  }
  return m;
}

}  // namespace chanres
