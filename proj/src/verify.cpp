#include "chanres/verify.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "chanres/channel_io.hpp"
#include "chanres/conic.hpp"
#include "chanres/error.hpp"
#include "chanres/superchannels.hpp"

namespace chanres {

namespace {

std::string eps_label(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

void add(SuiteReport& r, std::string property, std::string subject, double lhs, double rhs, bool equality = false) {
  PropertyCheck c{std::move(property), std::move(subject), lhs, rhs, equality, true};
  const double m = c.margin();
  c.pass = std::isnan(m) ? false : m >= -r.tol;
  r.checks.push_back(std::move(c));
}

double solve_or_throw(conic::Problem& p, const char* what) {
  const auto sol = p.solve();
  if (sol.status != conic::Status::Optimal && sol.status != conic::Status::Inaccurate) {
    throw Error(ErrorCode::SolverFailure, std::string(what) + ": " + conic::to_string(sol.status));
  }
  return sol.objective;
}

// log2 min { t : psi <= t sigma, sigma a free state }
double state_dmax(const CMatrix& psi, const FreeCone& states) {
  conic::Problem p;
  auto y = p.hermitian("Y", static_cast<int>(psi.rows()), false);
  states.impose(p, y);
  p.psd(y - conic::MatExpr(psi));
  p.minimize(y.trace());
  return std::log2(std::max(1.0, solve_or_throw(p, "state max-relative entropy")));
}

// -log2 max { <psi|sigma|psi> : sigma a free state }, the zero-error test for a pure psi
double state_dh0(const CMatrix& psi, const FreeCone& states) {
  conic::Problem p;
  auto s = p.hermitian("S", static_cast<int>(psi.rows()), false);
  states.impose(p, s);
  p.equal(s.trace(), conic::ScalarExpr(1.0));
  p.maximize(s.inner(psi));
  return -std::log2(solve_or_throw(p, "state hypothesis testing"));
}

}  // namespace

double PropertyCheck::margin() const {
  if (lhs == rhs) return 0.0;
  if (equality) return -std::abs(lhs - rhs);
  return lhs - rhs;
}

int SuiteReport::violations() const {
  int v = 0;
  for (const auto& c : checks) v += c.pass ? 0 : 1;
  return v;
}

double SuiteReport::worst() const {
  double w = 0.0;
  for (const auto& c : checks) {
    const double m = c.margin();
    if (std::isnan(m)) return m;
    w = std::min(w, m);
  }
  return w;
}

SuiteReport verify_ordering(Theory theory, const OrderingOptions& opts) {
  SuiteReport r;
  r.suite = "ordering";
  r.tol = opts.tol;
  const TheorySpec th = make_theory(theory, 2, 2);
  Rng rng(opts.seed);
  for (int c = 0; c < opts.channels; ++c) {
    const ChoiMatrix n = random_channel(rng, 2, 2).choi();
    std::optional<double> dmax0;
    for (double eps : opts.epsilons) {
      const std::string subject = "channel " + std::to_string(c) + " eps=" + eps_label(eps);
      const MonotoneReport lr = log_robustness(n, th, eps);
      const MonotoneReport mx = dmax(n, th, eps);
      const HInterval iv = dh_channel_interval(n, th, eps, opts.seesaw);
      const MonotoneReport ht = dh_choi(n, th, eps);
      const MonotoneReport hh = dh_unassisted(n, th, eps, opts.seesaw);
      if (eps == 0.0) dmax0 = mx.value;
      if (!lr.infinite()) add(r, "LR>=max", subject, lr.value, mx.value);
      add(r, "max>=H.hi", subject, mx.value, iv.hi.value);
      add(r, "H.hi>=H.lo", subject, iv.hi.value, iv.lo.value);
      add(r, "H.lo>=Htilde", subject, iv.lo.value, ht.value);
      add(r, "H.lo>=Hhat", subject, iv.lo.value, hh.value);
      if (opts.corrected) {
        if (!dmax0) dmax0 = dmax(n, th, 0.0).value;
        add(r, "corrected:max0+log2(1/(1-eps))>=H.hi", subject, *dmax0 - std::log2(1.0 - eps), iv.hi.value);
      }
    }
  }
  return r;
}

SuiteReport verify_collapse(Theory theory, std::string_view target, bool equal, double tol, const SeesawOptions& opts) {
  SuiteReport r;
  r.suite = "collapse";
  r.tol = tol;
  const TheorySpec th = registered_theory(theory, target);
  if (th.targetKind != TargetKind::Preparation) {
    throw Error(ErrorCode::InvalidArgument, "collapse applies to state preparation targets");
  }
  const ChoiMatrix g = th.target->choi();
  const CMatrix psi = g.matrix();  // one-dimensional input: the Choi state is the prepared state
  const FreeCone states(make_theory(theory, 1, g.dim_out()));
  const double sMax = state_dmax(psi, states);
  const double sH = state_dh0(psi, states);
  const double gMax = dmax(g, th).value;
  const HInterval iv = dh_channel_interval(g, th, 0.0, opts);
  const double ht = dh_choi(g, th).value;
  const double hh = dh_unassisted(g, th, 0.0, opts).value;

  const std::string subject = std::string(token(theory)) + " " + std::string(target);
  add(r, "max(state)>=max(G)", subject, sMax, gMax);
  add(r, "max(G)>=H.hi", subject, gMax, iv.hi.value);
  add(r, "H.hi>=H.lo", subject, iv.hi.value, iv.lo.value);
  add(r, "H.lo>=Htilde", subject, iv.lo.value, ht);
  add(r, "H.lo>=Hhat", subject, iv.lo.value, hh);
  add(r, "Htilde>=H(state)", subject, ht, sH);
  add(r, "Hhat>=H(state)", subject, hh, sH);
  if (equal) {
    add(r, "max=H.lo", subject, gMax, iv.lo.value, true);
    add(r, "max=H.hi", subject, gMax, iv.hi.value, true);
    add(r, "max=Htilde", subject, gMax, ht, true);
    add(r, "max=Hhat", subject, gMax, hh, true);
    add(r, "max=H(state)", subject, gMax, sH, true);
  }
  return r;
}

SuiteReport verify_monotonicity(Theory theory, const MonotonicityOptions& opts) {
  SuiteReport r;
  r.suite = "monotonicity";
  r.tol = opts.tol;
  const TheorySpec th = make_theory(theory, 2, 2);
  Rng rng(opts.seed);
  for (int c = 0; c < opts.channels; ++c) {
    const ChannelSpec n = random_channel(rng, 2, 2);
    for (Measure m : opts.measures) {
      const std::uint64_t seed = opts.seed * 1000003ULL + static_cast<std::uint64_t>(c) * 101ULL +
                                 static_cast<std::uint64_t>(m);
      const ProbeReport p = monotonicity_probe(th, m, n, opts.trials, seed, opts.tol, opts.seesaw);
      std::size_t offender = 0;
      for (const auto& t : p.trials) {
        add(r, std::string(token(m)) + "(N)>=" + std::string(token(m)) + "(S(N))",
            "channel " + std::to_string(c) + " trial " + std::to_string(t.trial), p.base.value, t.image.value);
        if (t.violation && opts.offenderDir && offender < p.offenders.size()) {
          std::filesystem::create_directories(*opts.offenderDir);
          const auto file = *opts.offenderDir / ("superchannel_" + std::string(token(theory)) + "_" +
                                                 std::string(token(m)) + "_c" + std::to_string(c) + "_t" +
                                                 std::to_string(t.trial) + ".json");
          write_json(file, p.offenders[offender++]);
          r.offenderFiles.push_back(file.string());
        }
      }
    }
  }
  return r;
}

std::string suite_csv_header() { return "suite,property,subject,lhs,rhs,margin,pass"; }

std::vector<std::string> suite_csv_rows(const SuiteReport& r) {
  std::vector<std::string> rows;
  for (const auto& c : r.checks) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.10g,%.10g,%.3g,%s", r.suite.c_str(), c.property.c_str(),
                  c.subject.c_str(), c.lhs, c.rhs, c.margin(), c.pass ? "pass" : "FAIL");
    rows.emplace_back(buf);
  }
  return rows;
}

std::vector<ReproRow> reproduce_constants(double tol, bool twoCopies, const SeesawOptions& opts) {
  std::vector<ReproRow> rows;
  for (const auto& [id, name] : registered_targets()) {
    const TheorySpec th = registered_theory(id, name);
    std::set<std::string> keys;
    for (const auto& kv : th.publishedConstants) keys.insert(kv.first);
    for (const auto& kv : th.analyticM) keys.insert(kv.first);
    const int d = th.target->dim_in() * th.target->dim_out();
    const int maxCopies = twoCopies && d * d <= kSdpChoiDimGuard ? 2 : 1;
    for (const auto& key : keys) {
      const Measure m = parse_measure(key);
      const bool published = th.publishedConstants.count(key) > 0;
      const double ref = published ? th.publishedConstants.at(key) : th.analyticM.at(key);
      for (int n = 1; n <= maxCopies; ++n) {
        const RegularizedValue v = regularized_m(m, th.target->choi(), th, n, opts);
        ReproRow row;
        row.theory = id;
        row.target = name;
        row.measure = key;
        row.copies = n;
        row.computed = v.value;
        row.computedUpper = v.upper;
        row.reference = ref;
        row.source = published ? "published" : "registered";
        row.kind = v.report.boundKind;
        row.pass = std::abs(v.value - ref) <= tol && (!v.upper || std::abs(*v.upper - ref) <= tol);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string repro_csv_header() { return "theory,target,measure,n,computed,computed_upper,reference,source,boundKind,status"; }

std::string repro_csv_row(const ReproRow& r) {
  char upper[32] = "";
  if (r.computedUpper) std::snprintf(upper, sizeof upper, "%.10g", *r.computedUpper);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,%.10g,%s,%.10g,%s,%s,%s", std::string(token(r.theory)).c_str(),
                r.target.c_str(), r.measure.c_str(), r.copies, r.computed, upper, r.reference, r.source.c_str(),
                std::string(to_string(r.kind)).c_str(), r.pass ? "pass" : "FAIL");
  return buf;
}

}  // namespace chanres
