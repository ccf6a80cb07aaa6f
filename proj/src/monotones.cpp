#include "chanres/monotones.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "optimize.hpp"

namespace chanres {

using conic::LinearMap;
using conic::MatExpr;
using conic::Problem;
using conic::ScalarExpr;
using conic::Solution;
using conic::Status;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// relative eigenvalue cutoff defining supports and kernels
constexpr double kSupportCut = 1e-10;
// D values beyond this are treated as infinite inside the seesaw search
constexpr double kSearchCap = 60.0;
constexpr double kProbeSlack = 1e-6;

void check_eps(double eps, bool allowOne) {
  if (!(eps >= 0.0) || eps > 1.0 || (!allowOne && eps >= 1.0))
    throw Error(ErrorCode::EpsilonOutOfRange, "epsilon out of range: " + std::to_string(eps));
}

void check_dims(const ChoiMatrix& n, const TheorySpec& t) {
  if (n.dim_in() != t.dimIn || n.dim_out() != t.dimOut)
    throw Error(ErrorCode::DimensionMismatch, "channel " + std::to_string(n.dim_in()) + "->" +
                                                  std::to_string(n.dim_out()) + " does not match theory dims " +
                                                  std::to_string(t.dimIn) + "->" + std::to_string(t.dimOut));
  if (n.dim() > kSdpChoiDimGuard)
    throw Error(ErrorCode::DimensionGuardExceeded,
                "Choi dimension " + std::to_string(n.dim()) + " exceeds the SDP guard " +
                    std::to_string(kSdpChoiDimGuard));
}

BoundKind kind_for(const TheorySpec& t) { return t.relaxation_flag() ? BoundKind::Lower : BoundKind::Exact; }

bool usable(const Solution& s) { return s.status == Status::Optimal || s.status == Status::Inaccurate; }

[[noreturn]] void solver_failure(const std::string& what, const Solution& s) {
  throw Error(ErrorCode::SolverFailure, what + ": " + conic::to_string(s.status) + " " + s.message);
}

LinearMap trace_out_b(int dA, int dB) { return LinearMap::partial_trace({dA, dB}, {1}); }

CMatrix projector(const CMatrix& h, bool support) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  const double cut = kSupportCut * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const int d = static_cast<int>(h.rows());
  CMatrix p = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const bool in = es.eigenvalues()(i) > cut;
    if (in == support) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return p;
}

double positive_part_trace(const CMatrix& h) {
  const RVector ev = eigenvalues(h);
  double s = 0.0;
  for (double e : ev) s += std::max(e, 0.0);
  return s;
}

double neg_log2(double beta) { return beta > 0.0 ? std::max(0.0, -std::log2(beta)) : kInf; }

// rho is rejected with zero type-II error when it lives mostly on ker(sigma)
bool orthogonal_enough(const CMatrix& rho, const CMatrix& sigma, double eps) {
  return (projector(sigma, false) * rho).trace().real() >= 1.0 - eps - 1e-12;
}

// N' in the eps diamond ball around N, or N itself for eps = 0.
MatExpr smoothed_choi(Problem& p, const ChoiMatrix& n, double eps) {
  if (eps == 0.0) return MatExpr(n.matrix());
  const int dA = n.dim_in(), dB = n.dim_out(), d = n.dim();
  const auto trB = trace_out_b(dA, dB);
  auto jp = p.hermitian("Jsmooth", d);
  p.equal(trB(jp), MatExpr(CMatrix(CMatrix::Identity(dA, dA) / dA)));
  auto z = p.hermitian("Zball", d);
  p.psd(z - (jp - MatExpr(n.matrix())) * static_cast<double>(dA));
  p.psd(MatExpr(CMatrix(eps * CMatrix::Identity(dA, dA))) - trB(z));
  return jp;
}

MonotoneReport base_report(const std::string& name, const TheorySpec& t, double eps) {
  MonotoneReport r;
  r.measureName = name;
  r.epsilon = eps;
  r.relaxationFlag = t.relaxation_flag();
  r.boundKind = kind_for(t);
  return r;
}

// ---------------------------------------------------------------------------
// Probe programs: maximize t subject to t <= score_k(M) for each probe input,
// over normalized free Choi matrices M.

enum class Score { Hypothesis, Fidelity };

struct ProbeInput {
  CMatrix psi;  // d_A x d_R amplitudes
};

CMatrix probe_output(const CMatrix& j, int dA, int dB, const CMatrix& psi) {
  const int dR = static_cast<int>(psi.cols());
  CMatrix out = CMatrix::Zero(dB * dR, dB * dR);
  for (int a = 0; a < dA; ++a)
    for (int ap = 0; ap < dA; ++ap) {
      const CMatrix rr = psi.row(a).transpose() * psi.row(ap).conjugate();
      if (rr.cwiseAbs().maxCoeff() == 0.0) continue;
      out += static_cast<double>(dA) * kron(j.block(a * dB, ap * dB, dB, dB), rr);
    }
  return out;
}

CMatrix max_entangled_probe(int dA) { return CMatrix::Identity(dA, dA) / std::sqrt(static_cast<double>(dA)); }

bool rank_one(const CMatrix& m) {
  const RVector ev = eigenvalues(m);
  int k = 0;
  for (double e : ev) k += e > kSupportCut * std::max(1.0, ev.maxCoeff()) ? 1 : 0;
  return k == 1;
}

// D-type score of two concrete states; fidelity scores are -log2 F.
double score_value(const CMatrix& rho, const CMatrix& sigma, double eps, Score s) {
  if (s == Score::Hypothesis) return dh_state_np(rho, sigma, eps);
  return neg_log2(fidelity_psd(rho, sigma));
}

struct ProbeSolve {
  double value = 0.0;  // min over M of max over probes, in D units
  CMatrix m;           // optimal normalized free Choi
  Solution sol;
};

ProbeSolve solve_probes(const ChoiMatrix& n, const TheorySpec& theory, double eps, Score score,
                        const std::vector<CMatrix>& outputsN, const std::vector<std::optional<LinearMap>>& maps) {
  const int d = n.dim();
  Problem p;
  auto y = p.hermitian("M", d, false);
  FreeCone(theory).impose(p, y);
  p.equal(y.trace(), ScalarExpr(1.0));
  auto t = p.scalar("t");
  const bool pure = score == Score::Fidelity && std::all_of(outputsN.begin(), outputsN.end(), rank_one);
  for (std::size_t k = 0; k < outputsN.size(); ++k) {
    const CMatrix& w = outputsN[k];
    const MatExpr wy = maps[k] ? (*maps[k])(y) : y;
    if (score == Score::Hypothesis && eps == 0.0) {
      p.nonneg(wy.inner(projector(w, true)) - t);
    } else if (score == Score::Hypothesis) {
      auto mu = p.scalar("mu", true);
      auto z = p.hermitian("Z", static_cast<int>(w.rows()));
      p.psd(z - conic::scalar_times(mu, w) + wy);
      p.nonneg(mu * (1.0 - eps) - z.trace() - t);
    } else if (pure) {
      p.nonneg(wy.inner(w) * (1.0 / w.trace().real()) - t);
    } else {
      const int m = static_cast<int>(w.rows());
      auto x = p.complex_matrix("X", m, m);
      p.psd(conic::block_matrix({{MatExpr(w), x}, {x.adjoint(), wy}}));
      p.nonneg(x.trace() - t);
    }
  }
  p.maximize(t);
  ProbeSolve r;
  r.sol = p.solve();
  if (!usable(r.sol)) solver_failure("probe program", r.sol);
  const double tv = r.sol.objective;
  r.value = (score == Score::Fidelity && !pure) ? neg_log2(tv * std::abs(tv)) : neg_log2(tv);
  r.m = hermitian_part(r.sol.value(y));
  return r;
}

struct SeesawResult {
  double lower = 0.0;
  double upper = 0.0;
  bool converged = false;
  bool inaccurate = false;
  double gap = 0.0;
  std::vector<CMatrix> probes;
};

CMatrix unpack_psi(const std::vector<double>& x, int dA, int dR) {
  CMatrix psi(dA, dR);
  for (int a = 0; a < dA; ++a)
    for (int r = 0; r < dR; ++r) {
      const std::size_t k = 2 * static_cast<std::size_t>(a * dR + r);
      psi(a, r) = Complex(x[k], x[k + 1]);
    }
  const double nrm = psi.norm();
  return nrm > 0 ? CMatrix(psi / nrm) : CMatrix(CMatrix::Identity(dA, dR) / std::sqrt(static_cast<double>(dR)));
}

std::vector<double> pack_psi(const CMatrix& psi) {
  std::vector<double> x;
  for (int a = 0; a < psi.rows(); ++a)
    for (int r = 0; r < psi.cols(); ++r) {
      x.push_back(psi(a, r).real());
      x.push_back(psi(a, r).imag());
    }
  return x;
}

SeesawResult seesaw(const ChoiMatrix& n, const TheorySpec& theory, double eps, Score score, int dR,
                    std::vector<CMatrix> probes, const SeesawOptions& opts, double stopAt) {
  const int dA = n.dim_in(), dB = n.dim_out(), d = n.dim();
  Rng rng(opts.seed);
  SeesawResult res;
  auto output_of = [&](const CMatrix& j, const CMatrix& psi) { return probe_output(j, dA, dB, psi); };

  std::vector<CMatrix> outs;
  std::vector<std::optional<LinearMap>> maps;
  auto add = [&](const CMatrix& psi) {
    outs.push_back(output_of(n.matrix(), psi));
    maps.emplace_back(LinearMap::from_function(d, d, [&](const CMatrix& m) { return output_of(m, psi); }));
    res.probes.push_back(psi);
  };
  for (const auto& psi : probes) add(psi);

  const bool trivialInput = dA * dR == 1;
  for (int alt = 0; alt < std::max(1, opts.maxAlternations); ++alt) {
    const ProbeSolve ps = solve_probes(n, theory, eps, score, outs, maps);
    res.lower = ps.value;
    res.gap = std::max(res.gap, ps.sol.gap);
    res.inaccurate = res.inaccurate || ps.sol.status == Status::Inaccurate;
    if (trivialInput || res.lower >= stopAt - kProbeSlack) {
      res.upper = res.lower;
      res.converged = true;
      break;
    }
    // inner search over pure inputs against the current free channel
    auto f = [&](const std::vector<double>& x) {
      const CMatrix psi = unpack_psi(x, dA, dR);
      return -std::min(kSearchCap, score_value(output_of(n.matrix(), psi), output_of(ps.m, psi), eps, score));
    };
    std::vector<std::vector<double>> starts;
    const std::size_t keep = std::min<std::size_t>(res.probes.size(), 3);
    for (std::size_t k = res.probes.size() - keep; k < res.probes.size(); ++k) starts.push_back(pack_psi(res.probes[k]));
    for (int k = 0; k < opts.restarts; ++k) {
      const CVector v = haar_pure_state(rng, dA * dR);
      CMatrix psi(dA, dR);
      for (int a = 0; a < dA; ++a)
        for (int r = 0; r < dR; ++r) psi(a, r) = v(a * dR + r);
      starts.push_back(pack_psi(psi));
    }
    std::vector<std::pair<double, CMatrix>> found;
    for (const auto& s : starts) {
      const auto nm = detail::nelder_mead(f, s, 0.2, opts.tol, 4000);
      found.emplace_back(-nm.f, unpack_psi(nm.x, dA, dR));
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double best = found.front().first;
    res.upper = std::max(best, res.lower);
    // the probe program is only accurate to the solver tolerance
    const double slack = std::max(opts.tol, kProbeSlack);
    if (best <= res.lower + slack) {
      res.converged = true;
      break;
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(3, found.size()); ++k)
      if (found[k].first > res.lower + slack) add(found[k].second);
  }
  return res;
}

std::vector<CMatrix> basis_probes(int dA) {
  std::vector<CMatrix> v;
  for (int a = 0; a < dA; ++a) v.push_back(CMatrix(CMatrix::Identity(dA, dA).col(a)));
  return v;
}

CMatrix with_ancilla(const CMatrix& psi, int dR) {
  CMatrix out = CMatrix::Zero(psi.rows(), dR);
  out.col(0) = psi.col(0);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Exact: return "exact";
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
    case BoundKind::Heuristic: return "heuristic";
  }
  return "?";
}

std::string_view token(Measure m) {
  switch (m) {
    case Measure::LR: return "LR";
    case Measure::Max: return "max";
    case Measure::H: return "H";
    case Measure::Htilde: return "Htilde";
    case Measure::Hhat: return "Hhat";
  }
  return "?";
}

Measure parse_measure(std::string_view t) {
  std::string s(t);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Measure m : {Measure::LR, Measure::Max, Measure::H, Measure::Htilde, Measure::Hhat}) {
    std::string k(token(m));
    std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
    if (k == s) return m;
  }
  if (s == "dmax") return Measure::Max;
  throw Error(ErrorCode::ParseError, "unknown measure '" + std::string(t) + "'");
}

bool MonotoneReport::infinite() const { return std::isinf(value); }

double diamond_distance(const ChoiMatrix& n, const ChoiMatrix& m) {
  if (n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out())
    throw Error(ErrorCode::DimensionMismatch, "diamond distance needs equal dims");
  const int dA = n.dim_in(), dB = n.dim_out();
  const CMatrix delta = static_cast<double>(dA) * (n.matrix() - m.matrix());
  if (delta.cwiseAbs().maxCoeff() < 1e-15) return 0.0;
  Problem p;
  auto z = p.hermitian("Z", dA * dB);
  auto t = p.scalar("t");
  p.psd(z - MatExpr(delta));
  p.psd(conic::scalar_times(t, CMatrix::Identity(dA, dA)) - trace_out_b(dA, dB)(z));
  p.minimize(t);
  const auto sol = p.solve();
  if (!usable(sol)) solver_failure("diamond distance", sol);
  return std::clamp(sol.objective, 0.0, 1.0);
}

double diamond_distance(const ChannelSpec& n, const ChannelSpec& m) { return diamond_distance(n.choi(), m.choi()); }

MonotoneReport log_robustness(const ChoiMatrix& n, const TheorySpec& theory, double eps) {
  check_dims(n, theory);
  check_eps(eps, true);
  MonotoneReport r = base_report("LR", theory, eps);
  Problem p;
  const MatExpr j = smoothed_choi(p, n, eps);
  auto x = p.hermitian("X", n.dim(), false);
  const FreeCone cone(theory);
  cone.impose(p, x);
  const auto ids = cone.impose(p, j + x);
  p.minimize(x.trace());
  const auto sol = p.solve();
  if (sol.status == Status::Infeasible) {
    r.value = kInf;
    if (sol.certificate) r.dualCertificate = CMatrix(sol.certificate->cast<Complex>());
    return r;
  }
  if (!usable(sol)) solver_failure("log robustness", sol);
  r.value = std::log2(1.0 + std::max(0.0, sol.objective));
  r.solverGap = sol.gap;
  r.inaccurate = sol.status == Status::Inaccurate;
  r.dualCertificate = sol.psd_dual(ids.front());
  return r;
}

MonotoneReport dmax(const ChoiMatrix& n, const TheorySpec& theory, double eps) {
  check_dims(n, theory);
  check_eps(eps, true);
  MonotoneReport r = base_report("max", theory, eps);
  Problem p;
  const MatExpr j = smoothed_choi(p, n, eps);
  auto y = p.hermitian("Y", n.dim(), false);
  FreeCone(theory).impose(p, y);
  const auto dom = p.psd(y - j);
  p.minimize(y.trace());
  const auto sol = p.solve();
  if (!usable(sol)) solver_failure("max-relative entropy", sol);
  r.value = std::log2(std::max(1.0, sol.objective));
  r.solverGap = sol.gap;
  r.inaccurate = sol.status == Status::Inaccurate;
  r.dualCertificate = sol.psd_dual(dom);
  return r;
}

double dh_state(const CMatrix& rho, const CMatrix& sigma, double eps) {
  check_eps(eps, false);
  if (rho.rows() != sigma.rows() || rho.rows() != rho.cols() || sigma.rows() != sigma.cols())
    throw Error(ErrorCode::DimensionMismatch, "states must have equal dims");
  if (orthogonal_enough(rho, sigma, eps)) return kInf;
  const int d = static_cast<int>(rho.rows());
  Problem p;
  auto a = p.hermitian("A", d);
  p.psd(MatExpr(CMatrix(CMatrix::Identity(d, d))) - a);
  p.nonneg(a.inner(rho) - ScalarExpr(1.0 - eps));
  p.minimize(a.inner(sigma));
  const auto sol = p.solve();
  if (!usable(sol)) solver_failure("hypothesis test", sol);
  return neg_log2(sol.objective);
}

double dh_state_np(const CMatrix& rho, const CMatrix& sigma, double eps) {
  check_eps(eps, false);
  if (rho.rows() != sigma.rows())
    throw Error(ErrorCode::DimensionMismatch, "states must have equal dims");
  if (eps == 0.0) return neg_log2((projector(rho, true) * sigma).trace().real());
  if (orthogonal_enough(rho, sigma, eps)) return kInf;
  auto g = [&](double mu) { return mu * (1.0 - eps) - positive_part_trace(mu * rho - sigma); };
  double hi = 1.0;
  while (g(2.0 * hi) > g(hi) && hi < 1e12) hi *= 2.0;
  const auto [mu, beta] = detail::maximize_concave(g, 0.0, 2.0 * hi);
  (void)mu;
  return neg_log2(beta);
}

MonotoneReport dh_choi(const ChoiMatrix& n, const TheorySpec& theory, double eps) {
  check_dims(n, theory);
  check_eps(eps, false);
  MonotoneReport r = base_report("Htilde", theory, eps);
  const ProbeSolve ps = solve_probes(n, theory, eps, Score::Hypothesis, {n.matrix()}, {std::nullopt});
  r.value = ps.value;
  r.solverGap = ps.sol.gap;
  r.inaccurate = ps.sol.status == Status::Inaccurate;
  r.dualCertificate = ps.m;
  return r;
}

MonotoneReport dh_unassisted(const ChoiMatrix& n, const TheorySpec& theory, double eps, const SeesawOptions& opts) {
  check_dims(n, theory);
  check_eps(eps, false);
  MonotoneReport r = base_report("Hhat", theory, eps);
  // D_max caps every hypothesis-testing measure at eps = 0
  const double cap = eps == 0.0 ? dmax(n, theory, 0.0).value : kInf;
  const auto s = seesaw(n, theory, eps, Score::Hypothesis, 1, basis_probes(n.dim_in()), opts, cap);
  r.value = s.lower;
  r.upperEstimate = s.upper;
  r.solverGap = s.gap;
  r.inaccurate = s.inaccurate || !s.converged;
  if (n.dim_in() > 1) r.boundKind = BoundKind::Heuristic;
  return r;
}

HInterval dh_channel_interval(const ChoiMatrix& n, const TheorySpec& theory, double eps, const SeesawOptions& opts) {
  check_dims(n, theory);
  check_eps(eps, false);
  HInterval out;
  out.hi = dmax(n, theory, 0.0);
  out.hi.measureName = "H";
  out.hi.epsilon = eps;
  out.hi.value += -std::log2(1.0 - eps);
  out.hi.boundKind = BoundKind::Upper;

  const int dA = n.dim_in();
  // ancilla-assisted probes contain the unassisted ones as product inputs
  std::vector<CMatrix> probes;
  if (dA > 1) probes.push_back(max_entangled_probe(dA));
  for (const auto& psi : basis_probes(dA)) probes.push_back(with_ancilla(psi, dA));
  const auto as = seesaw(n, theory, eps, Score::Hypothesis, dA, probes, opts, out.hi.value);
  out.lo = base_report("H", theory, eps);
  out.lo.boundKind = BoundKind::Lower;
  out.lo.value = as.lower;
  out.lo.upperEstimate = out.hi.value;
  out.lo.solverGap = as.gap;
  out.lo.inaccurate = as.inaccurate;
  if (out.lo.value > out.hi.value) {
    if (out.lo.value > out.hi.value + 1e-7) {
      out.lo.inaccurate = true;
      out.hi.inaccurate = true;
    } else {
      out.lo.value = out.hi.value;
    }
  }
  return out;
}

FidelityReport fidelity_measures(const ChoiMatrix& u, const TheorySpec& theory, const SeesawOptions& opts) {
  check_dims(u, theory);
  FidelityReport r;
  r.unitaryInput = rank_one(u.matrix());
  const int d = u.dim();
  {
    Problem p;
    auto y = p.hermitian("M", d, false);
    FreeCone(theory).impose(p, y);
    p.equal(y.trace(), ScalarExpr(1.0));
    auto x = p.complex_matrix("X", d, d);
    p.psd(conic::block_matrix({{MatExpr(u.matrix()), x}, {x.adjoint(), y}}));
    p.maximize(x.trace());
    const auto sol = p.solve();
    if (!usable(sol)) solver_failure("fidelity program", sol);
    r.fidelityTilde = std::min(1.0, sol.objective * sol.objective);
    r.gap = sol.gap;
  }
  const int dA = u.dim_in();
  const auto s = seesaw(u, theory, 0.0, Score::Fidelity, dA, {max_entangled_probe(dA)}, opts, kInf);
  r.fidelity = std::exp2(-s.lower);
  r.fidelityKind = BoundKind::Heuristic;
  return r;
}

EntropyReport channel_entropy(const ChoiMatrix& n, std::uint64_t seed, int restarts) {
  const int dA = n.dim_in(), dB = n.dim_out();
  const double logB = std::log2(static_cast<double>(dB));
  EntropyReport r;
  if (dA == 1) {
    r.value = logB - entropy(n.matrix());
    return r;
  }
  auto objective = [&](const std::vector<double>& x) {
    CMatrix t(dA, dA);
    for (int i = 0; i < dA * dA; ++i) t(i / dA, i % dA) = Complex(x[2 * i], x[2 * i + 1]);
    CMatrix sigma = t * t.adjoint();
    const double tr = sigma.trace().real();
    if (tr <= 0) return 0.0;
    sigma /= tr;
    const CMatrix s = kron(sqrtm_psd(sigma), CMatrix::Identity(dB, dB));
    const CMatrix omega = static_cast<double>(dA) * s * n.matrix() * s;
    return -(logB + entropy(sigma) - entropy(hermitian_part(omega)));
  };
  Rng rng(seed);
  std::vector<std::vector<double>> starts;
  {
    std::vector<double> id(2 * static_cast<std::size_t>(dA * dA), 0.0);
    for (int i = 0; i < dA; ++i) id[2 * static_cast<std::size_t>(i * dA + i)] = 1.0;
    starts.push_back(id);
  }
  for (int k = 0; k < restarts; ++k) {
    const CMatrix g = ginibre(rng, dA, dA);
    std::vector<double> x;
    for (int i = 0; i < dA * dA; ++i) {
      x.push_back(g(i / dA, i % dA).real());
      x.push_back(g(i / dA, i % dA).imag());
    }
    starts.push_back(x);
  }
  double best = -kInf;
  bool conv = true;
  for (const auto& s : starts) {
    const auto nm = detail::nelder_mead(objective, s, 0.3, 1e-9, 20000);
    if (-nm.f > best) {
      best = -nm.f;
      conv = nm.converged;
    }
  }
  r.value = std::max(0.0, best);
  r.converged = conv;
  return r;
}

MonotoneReport evaluate(Measure measure, const ChoiMatrix& n, const TheorySpec& theory, double eps,
                        const SeesawOptions& opts) {
  switch (measure) {
    case Measure::LR: return log_robustness(n, theory, eps);
    case Measure::Max: return dmax(n, theory, eps);
    case Measure::Htilde: return dh_choi(n, theory, eps);
    case Measure::Hhat: return dh_unassisted(n, theory, eps, opts);
    case Measure::H: return dh_channel_interval(n, theory, eps, opts).lo;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

RegularizedValue regularized_m(Measure measure, const ChoiMatrix& target, const TheorySpec& theory, int n,
                               const SeesawOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const ChoiMatrix tn = n == 1 ? target : tensor_power(target, n);
  const TheorySpec thn = n == 1 ? theory : theory.power(n);
  RegularizedValue out;
  if (measure == Measure::H) {
    const auto iv = dh_channel_interval(tn, thn, 0.0, opts);
    out.report = iv.lo;
    out.upper = iv.hi.value / n;
  } else {
    out.report = evaluate(measure, tn, thn, 0.0, opts);
  }
  out.value = out.report.value / n;
  const auto it = theory.analyticM.find(std::string(token(measure)));
  if (it != theory.analyticM.end()) {
    out.analytic = it->second;
    out.agrees = std::abs(out.value - it->second) <= 1e-5;
    if (out.upper) out.agrees = out.agrees && std::abs(*out.upper - it->second) <= 1e-5;
  }
  return out;
}

std::string monotone_csv_header() { return "theory,measure,epsilon,value,boundKind,relaxationFlag,gap"; }

std::string monotone_csv_row(const TheorySpec& theory, const MonotoneReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%.10g,%s,%d,%.3g", std::string(token(theory.id)).c_str(),
                r.measureName.c_str(), r.epsilon, r.value, std::string(to_string(r.boundKind)).c_str(),
                r.relaxationFlag ? 1 : 0, r.solverGap);
  return buf;
}

}  // namespace chanres
