#include "chanres/superchannels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "chanres/channel_io.hpp"
#include "chanres/error.hpp"

namespace chanres {

using nlohmann::json;

namespace {

using KrausList = std::vector<CMatrix>;

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

KrausList kraus_of(const ChannelSpec& c) { return c.kraus() ? *c.kraus() : choi_to_kraus(c.choi()); }

KrausList scaled(KrausList ops, double weight) {
  const double s = std::sqrt(weight);
  for (auto& k : ops) k *= s;
  return ops;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> random_weights(Rng& rng, int n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = ex(rng) + 1e-3;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

CVector basis(int d, int i) {
  CVector v = CVector::Zero(d);
  v(i) = 1.0;
  return v;
}

// X -> Tr_1[U (X (x) I/dOut) U^dag] with U on dIn*dOut: unital and trace preserving.
KrausList random_unital(Rng& rng, int dIn, int dOut) {
  const CMatrix u = haar_unitary(rng, dIn * dOut);
  KrausList ops;
  for (int i = 0; i < dIn; ++i) {
    const CMatrix left = kron(basis(dIn, i).adjoint(), CMatrix::Identity(dOut, dOut));
    for (int j = 0; j < dOut; ++j) {
      const CMatrix right = kron(CMatrix::Identity(dIn, dIn), basis(dOut, j));
      ops.push_back(left * u * right / std::sqrt(static_cast<double>(dOut)));
    }
  }
  return ops;
}

// Mixture of a classical stochastic map and an incoherent operation whose
// Kraus operators send blocks of basis vectors injectively, with phases.
KrausList random_mio(Rng& rng, int dIn, int dOut) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double q = unit(rng);
  KrausList ops;
  for (int i = 0; i < dIn; ++i) {
    const auto p = random_weights(rng, dOut);
    for (int j = 0; j < dOut; ++j) {
      CMatrix k = CMatrix::Zero(dOut, dIn);
      k(j, i) = std::sqrt(q * p[j]);
      ops.push_back(std::move(k));
    }
  }
  std::vector<int> order(dIn);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int start = 0; start < dIn; start += dOut) {
    std::vector<int> targets(dOut);
    std::iota(targets.begin(), targets.end(), 0);
    std::shuffle(targets.begin(), targets.end(), rng);
    CMatrix k = CMatrix::Zero(dOut, dIn);
    for (int s = start; s < std::min(dIn, start + dOut); ++s) {
      k(targets[s - start], order[s]) = std::sqrt(1.0 - q) * std::polar(1.0, 2.0 * M_PI * unit(rng));
    }
    ops.push_back(std::move(k));
  }
  return ops;
}

// Permutation taking the basis in factor order to the basis with factors
// reordered as perm (new factor k = old factor perm[k]).
CMatrix permutation_matrix(const std::vector<int>& dims, const std::vector<int>& perm) {
  const int total = product(dims);
  const int n = static_cast<int>(dims.size());
  std::vector<int> newDims(n);
  for (int k = 0; k < n; ++k) newDims[k] = dims[perm[k]];
  CMatrix p = CMatrix::Zero(total, total);
  std::vector<int> idx(n);
  for (int old = 0; old < total; ++old) {
    int r = old;
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = r % dims[k];
      r /= dims[k];
    }
    int neu = 0;
    for (int k = 0; k < n; ++k) neu = neu * newDims[k] + idx[perm[k]];
    p(neu, old) = 1.0;
  }
  return p;
}

struct PartySplit {
  std::vector<int> perm;  // party 1 factors, then party 2
  int dim1 = 1;
  int dim2 = 1;
};

PartySplit split_parties(const std::vector<int>& dims, const std::vector<int>& party) {
  PartySplit s;
  for (int want : {1, 2}) {
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
      if (party[k] != want) continue;
      s.perm.push_back(k);
      (want == 1 ? s.dim1 : s.dim2) *= dims[k];
    }
  }
  return s;
}

// Product of one random channel per party, in the given factor layout.
KrausList random_local(Rng& rng, const std::vector<int>& inDims, const std::vector<int>& inParty,
                       const std::vector<int>& outDims, const std::vector<int>& outParty) {
  const PartySplit in = split_parties(inDims, inParty);
  const PartySplit out = split_parties(outDims, outParty);
  const KrausList k1 = kraus_of(random_channel(rng, in.dim1, out.dim1));
  const KrausList k2 = kraus_of(random_channel(rng, in.dim2, out.dim2));
  const CMatrix pIn = permutation_matrix(inDims, in.perm);
  const CMatrix pOut = permutation_matrix(outDims, out.perm);
  KrausList ops;
  for (const auto& a : k1)
    for (const auto& b : k2) ops.push_back(pOut.transpose() * kron(a, b) * pIn);
  return ops;
}

KrausList random_instrument_part(const KrausList& all, int outcome, int outcomes) {
  KrausList part;
  for (int j = outcome; j < static_cast<int>(all.size()); j += outcomes) part.push_back(all[j]);
  return part;
}

const Bipartition& require_cut(const TheorySpec& theory) {
  require(theory.bipartition.has_value(), ErrorCode::UnsupportedTheory, "entanglement theory without a bipartition");
  return *theory.bipartition;
}

ChannelSpec measure_prepare(Rng& rng, int dIn, int dOut) {
  const int outcomes = dIn + 1;
  const KrausList meas = kraus_of(random_channel(rng, dIn, outcomes));
  CMatrix choi = CMatrix::Zero(dIn * dOut, dIn * dOut);
  for (int k = 0; k < outcomes; ++k) {
    CMatrix m = CMatrix::Zero(dIn, dIn);
    for (const auto& op : meas) m += op.row(k).adjoint() * op.row(k);
    choi += kron(m.transpose(), random_density(rng, dOut));
  }
  return ChannelSpec::from_choi(ChoiMatrix(dIn, dOut, hermitian_part(choi / static_cast<double>(dIn))));
}

const char* family_of(Theory t) {
  switch (t) {
    case Theory::Purity: return "instrument pre, unital post per outcome, classical E";
    case Theory::ClassicalCapacity: return "shared randomness E, arbitrary pre and post";
    case Theory::QuantumCapacity: return "instrument pre, arbitrary post per outcome, classical E";
    case Theory::NonUniformity: return "unital pre and post, uniform shared randomness E";
    case Theory::Coherence: return "incoherent pre and post, shared randomness E";
    case Theory::Entanglement: return "local pre and post on the cut, shared randomness E";
  }
  return "";
}

}  // namespace

Superchannel::Superchannel(ChannelSpec pre, ChannelSpec post, int dimA, int dimB, int dimE, std::string family)
    : pre_(std::move(pre)), post_(std::move(post)), dimA_(dimA), dimB_(dimB), dimE_(dimE), family_(std::move(family)) {
  require(dimA > 0 && dimB > 0 && dimE > 0, ErrorCode::DimensionMismatch, "superchannel dims must be positive");
  require(pre_.dim_out() == dimA * dimE, ErrorCode::DimensionMismatch, "pre-channel output is not A (x) E");
  require(post_.dim_in() == dimB * dimE, ErrorCode::DimensionMismatch, "post-channel input is not B (x) E");
}

int default_ancilla_dim(int dimA, int dimB) {
  int e = dimA * dimB;
  while (e > 1 && static_cast<double>(dimA) * dimB * e * e > kDimensionGuard) --e;
  return e;
}

ChannelSpec apply_superchannel(const Superchannel& s, const ChannelSpec& n) {
  require(n.dim_in() == s.dim_a() && n.dim_out() == s.dim_b(), ErrorCode::DimensionMismatch,
          "channel does not fit the superchannel slot");
  const int dE = s.dim_e();
  require(static_cast<double>(s.dim_a()) * s.dim_b() * dE * dE <= kDimensionGuard,
          ErrorCode::DimensionGuardExceeded, "N (x) id_E too large");
  const int dC = s.dim_c();
  const int dD = s.dim_d();
  const KrausList pre = kraus_of(s.pre());
  const KrausList mid = kraus_of(n);
  const KrausList post = kraus_of(s.post());
  const CMatrix idE = CMatrix::Identity(dE, dE);

  CMatrix choi = CMatrix::Zero(dC * dD, dC * dD);
  CVector v(dC * dD);
  for (const auto& m : pre) {
    for (const auto& k : mid) {
      const CMatrix t = kron(k, idE) * m;
      for (const auto& l : post) {
        const CMatrix f = l * t;
        for (int i = 0; i < dC; ++i)
          for (int j = 0; j < dD; ++j) v(i * dD + j) = f(j, i);
        choi.noalias() += v * v.adjoint();
      }
    }
  }
  return ChannelSpec::from_choi(ChoiMatrix(dC, dD, hermitian_part(choi / static_cast<double>(dC))));
}

Superchannel identity_superchannel(int dimA, int dimB) {
  return Superchannel(channels::identity(dimA), channels::identity(dimB), dimA, dimB, 1, "identity");
}

Superchannel replacement_superchannel(int dimA, int dimB, int dimC, const CMatrix& sigma) {
  const CMatrix a0 = CMatrix::Identity(dimA, dimA) / static_cast<double>(dimA);
  return Superchannel(channels::replacement(dimC, a0), channels::replacement(dimB, sigma), dimA, dimB, 1,
                      "replacement");
}

ChannelSpec random_free_channel(const TheorySpec& theory, Rng& rng) {
  const int dA = theory.dimIn;
  const int dB = theory.dimOut;
  switch (theory.id) {
    case Theory::Purity: return channels::fully_depolarizing(dA, dB);
    case Theory::ClassicalCapacity: return channels::replacement(dA, random_density(rng, dB));
    case Theory::QuantumCapacity: return measure_prepare(rng, dA, dB);
    case Theory::NonUniformity: return ChannelSpec::from_kraus(random_unital(rng, dA, dB), dA, dB);
    case Theory::Coherence: return ChannelSpec::from_kraus(random_mio(rng, dA, dB), dA, dB);
    case Theory::Entanglement: {
      const Bipartition& cut = require_cut(theory);
      const auto w = random_weights(rng, 3);
      CMatrix choi = CMatrix::Zero(dA * dB, dA * dB);
      for (double p : w) {
        const auto ops = random_local(rng, cut.inDims, cut.inParty, cut.outDims, cut.outParty);
        choi += p * kraus_to_choi(ops, dA, dB).matrix();
      }
      // With every input on one side and every output on the other, a free
      // channel may also measure and prepare.
      const bool oneWay = std::all_of(cut.inParty.begin(), cut.inParty.end(), [&](int p) { return p == cut.inParty[0]; }) &&
                          std::all_of(cut.outParty.begin(), cut.outParty.end(), [&](int p) { return p != cut.inParty[0]; });
      if (oneWay) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double q = unit(rng);
        choi = (1.0 - q) * choi + q * measure_prepare(rng, dA, dB).choi().matrix();
      }
      return ChannelSpec::from_choi(ChoiMatrix(dA, dB, hermitian_part(choi)));
    }
  }
  throw Error(ErrorCode::UnsupportedTheory, "no free channel sampler");
}

Superchannel random_free_superchannel(const TheorySpec& theory, const SuperchannelDims& dims, std::uint64_t seed) {
  const int dA = dims.dimA, dB = dims.dimB, dC = dims.dimC, dD = dims.dimD;
  require(dA > 0 && dB > 0 && dC > 0 && dD > 0, ErrorCode::DimensionMismatch, "dims must be positive");
  require(theory.dimIn == dA && theory.dimOut == dB, ErrorCode::DimensionMismatch,
          "theory dims differ from the superchannel slot");
  const int dE = dims.dimE > 0 ? dims.dimE : default_ancilla_dim(dA, dB);
  require(static_cast<double>(dA) * dB * dE * dE <= kDimensionGuard, ErrorCode::DimensionGuardExceeded,
          "ancilla too large");

  Rng rng(splitmix(seed));
  std::vector<KrausList> pre(dE), post(dE);
  const auto w = random_weights(rng, dE);
  switch (theory.id) {
    case Theory::Purity:
    case Theory::QuantumCapacity: {
      const KrausList all = kraus_of(random_channel(rng, dC, dA, dE * dC));
      for (int e = 0; e < dE; ++e) {
        pre[e] = random_instrument_part(all, e, dE);
        post[e] = theory.id == Theory::Purity ? random_unital(rng, dB, dD) : kraus_of(random_channel(rng, dB, dD));
      }
      break;
    }
    case Theory::ClassicalCapacity:
      for (int e = 0; e < dE; ++e) {
        pre[e] = scaled(kraus_of(random_channel(rng, dC, dA)), w[e]);
        post[e] = kraus_of(random_channel(rng, dB, dD));
      }
      break;
    case Theory::NonUniformity:
      for (int e = 0; e < dE; ++e) {
        pre[e] = scaled(random_unital(rng, dC, dA), 1.0 / dE);
        post[e] = random_unital(rng, dB, dD);
      }
      break;
    case Theory::Coherence:
      for (int e = 0; e < dE; ++e) {
        pre[e] = scaled(random_mio(rng, dC, dA), w[e]);
        post[e] = random_mio(rng, dB, dD);
      }
      break;
    case Theory::Entanglement: {
      require(dC == dA && dD == dB, ErrorCode::UnsupportedDims,
              "entangling-free superchannels are built for C = A and D = B only");
      const Bipartition& cut = require_cut(theory);
      for (int e = 0; e < dE; ++e) {
        pre[e] = scaled(random_local(rng, cut.inDims, cut.inParty, cut.inDims, cut.inParty), w[e]);
        post[e] = random_local(rng, cut.outDims, cut.outParty, cut.outDims, cut.outParty);
      }
      break;
    }
  }

  KrausList preOps, postOps;
  for (int e = 0; e < dE; ++e) {
    const CVector ket = basis(dE, e);
    for (const auto& k : pre[e]) preOps.push_back(kron(k, ket));
    for (const auto& l : post[e]) postOps.push_back(kron(l, ket.adjoint()));
  }
  return Superchannel(ChannelSpec::from_kraus(std::move(preOps), dC, dA * dE),
                      ChannelSpec::from_kraus(std::move(postOps), dB * dE, dD), dA, dB, dE, family_of(theory.id));
}

json superchannel_to_json(const Superchannel& s) {
  json j;
  j["kind"] = "superchannel";
  j["family"] = s.family();
  j["dim_a"] = s.dim_a();
  j["dim_b"] = s.dim_b();
  j["dim_c"] = s.dim_c();
  j["dim_d"] = s.dim_d();
  j["dim_e"] = s.dim_e();
  j["pre"] = channel_to_json(s.pre());
  j["post"] = channel_to_json(s.post());
  return j;
}

Superchannel superchannel_from_json(const json& j) {
  try {
    require(j.is_object() && j.value("kind", "") == "superchannel", ErrorCode::ParseError, "not a superchannel document");
    Superchannel s(channel_from_json(j.at("pre")), channel_from_json(j.at("post")), j.at("dim_a").get<int>(),
                   j.at("dim_b").get<int>(), j.at("dim_e").get<int>(), j.value("family", ""));
    require(s.dim_c() == j.at("dim_c").get<int>() && s.dim_d() == j.at("dim_d").get<int>(), ErrorCode::ParseError,
            "superchannel dims disagree with its channels");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

int ProbeReport::violations() const {
  int v = 0;
  for (const auto& t : trials) v += t.violation ? 1 : 0;
  return v;
}

ProbeReport monotonicity_probe(const TheorySpec& theory, Measure measure, const ChannelSpec& n, int trials,
                               std::uint64_t seed, double tol, const SeesawOptions& opts) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be at least 1");
  require(n.dim_in() == theory.dimIn && n.dim_out() == theory.dimOut, ErrorCode::DimensionMismatch,
          "channel dims differ from the theory");
  ProbeReport report;
  report.theory = theory.id;
  report.measure = measure;
  report.family = family_of(theory.id);
  report.tolerance = tol;
  report.base = evaluate(measure, n.choi(), theory, 0.0, opts);
  report.maxExcess = -std::numeric_limits<double>::infinity();

  const SuperchannelDims dims{n.dim_in(), n.dim_out(), n.dim_in(), n.dim_out(), 0};
  for (int t = 0; t < trials; ++t) {
    ProbeTrial trial;
    trial.trial = t;
    trial.seed = splitmix(seed ^ (0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(t + 1)));
    const Superchannel s = random_free_superchannel(theory, dims, trial.seed);
    trial.image = evaluate(measure, apply_superchannel(s, n).choi(), theory, 0.0, opts);
    const double a = trial.image.value;
    const double b = report.base.value;
    if (std::isinf(b)) {
      trial.excess = std::isinf(a) ? 0.0 : -std::numeric_limits<double>::infinity();
    } else {
      trial.excess = a - b;
    }
    trial.violation = trial.excess > tol;
    if (trial.violation) report.offenders.push_back(superchannel_to_json(s));
    report.maxExcess = std::max(report.maxExcess, trial.excess);
    report.trials.push_back(std::move(trial));
  }
  return report;
}

std::string probe_csv_header() { return monotone_csv_header() + ",superchannel"; }

std::vector<std::string> probe_csv_rows(const ProbeReport& report, const TheorySpec& theory,
                                        const std::optional<std::filesystem::path>& dir) {
  std::vector<std::string> rows;
  std::size_t offender = 0;
  for (const auto& t : report.trials) {
    std::string path;
    if (t.violation && offender < report.offenders.size()) {
      const json& s = report.offenders[offender++];
      if (dir) {
        std::filesystem::create_directories(*dir);
        const auto file = *dir / ("superchannel_" + std::string(token(report.theory)) + "_" +
                                  std::string(token(report.measure)) + "_" + std::to_string(t.trial) + ".json");
        write_json(file, s);
        path = file.string();
      }
    }
    rows.push_back(monotone_csv_row(theory, t.image) + "," + path);
  }
  return rows;
}

}  // namespace chanres
