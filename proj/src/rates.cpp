#include "chanres/rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "chanres/conic.hpp"
#include "chanres/error.hpp"

namespace chanres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConstantTraceTol = 1e-7;

std::string key(Measure m) { return std::string(token(m)); }

std::string lower_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Largest n with (d_A d_B)^n inside the semidefinite guard, at most 2.
int computable_copies(const ChannelSpec& target) {
  const int d = target.dim_in() * target.dim_out();
  int k = 0;
  double size = 1.0;
  while (k < 2 && size * d <= kSdpChoiDimGuard) {
    size *= d;
    ++k;
  }
  return k;
}

// Regularized measures of the target: the registered constant when there is
// one, otherwise computed for the copies that fit and held fixed beyond.
class TargetM {
 public:
  TargetM(const TheorySpec& theory, const RateOptions& opts, RateBounds& out)
      : theory_(theory), opts_(opts), out_(out), kmax_(computable_copies(*theory.target)) {}

  bool registered(Measure m) const { return theory_.analyticM.count(key(m)) > 0; }

  std::optional<double> constant(Measure m) const {
    const auto it = theory_.analyticM.find(key(m));
    if (it == theory_.analyticM.end()) return std::nullopt;
    return it->second;
  }

  /// m(n); `upperEnd` selects the interval's upper end for H.
  double operator()(Measure m, int n, bool upperEnd = false) {
    if (auto c = constant(m)) {
      note(m, 0, *c, BoundKind::Exact, false);
      return *c;
    }
    if (kmax_ < 1) {
      throw Error(ErrorCode::DimensionGuardExceeded, "target too large for a computed regularized measure");
    }
    const int k = std::min(n, kmax_);
    if (n > kmax_) flag("m-extrapolated-from-n=" + std::to_string(kmax_));
    auto it = cache_.find({m, k});
    if (it == cache_.end()) {
      it = cache_.emplace(std::make_pair(m, k), regularized_m(m, theory_.target->choi(), theory_, k, opts_.seesaw)).first;
      const RegularizedValue& r = it->second;
      note(m, k, r.value, r.report.boundKind, r.report.relaxationFlag);
      if (r.upper) note(m, -k, *r.upper, BoundKind::Upper, r.report.relaxationFlag);
      flag("m-computed");
    }
    const RegularizedValue& r = it->second;
    return upperEnd && r.upper ? *r.upper : r.value;
  }

  void flag(const std::string& f) {
    if (!out_.has_flag(f)) out_.flags.push_back(f);
  }

 private:
  void note(Measure m, int k, double v, BoundKind kind, bool relaxed) {
    std::string name = "m_" + key(m);
    if (k > 0) name += "(" + std::to_string(k) + ")";
    if (k < 0) name += "(" + std::to_string(-k) + ",upper)";
    for (const auto& in : out_.inputs)
      if (in.name == name) return;
    out_.inputs.push_back({name, v, kind, relaxed});
  }

  const TheorySpec& theory_;
  const RateOptions& opts_;
  RateBounds& out_;
  int kmax_;
  std::map<std::pair<Measure, int>, RegularizedValue> cache_;
};

void add_input(RateBounds& b, const std::string& name, const MonotoneReport& r) {
  b.inputs.push_back({name, r.value, r.boundKind, r.relaxationFlag});
}

void finish_flags(RateBounds& b) {
  bool heuristic = false, relaxed = false;
  for (const auto& in : b.inputs) {
    heuristic = heuristic || in.kind == BoundKind::Heuristic;
    relaxed = relaxed || in.relaxed;
  }
  auto add = [&](const char* f) {
    if (!b.has_flag(f)) b.flags.push_back(f);
  };
  if (heuristic) add("heuristic-inputs");
  if (relaxed) add("upper-not-certified-tight");
  if (b.nUpper && *b.nUpper < b.nLower) {
    add("bracket-crossed");
    b.diagnostic += (b.diagnostic.empty() ? "" : " ") + std::string("lower end lowered to the upper end");
    b.nLower = *b.nUpper;
  }
}

TheorySpec theory_for_channel(const ChannelSpec& n, const TheorySpec& theory) {
  if (!theory.target) throw Error(ErrorCode::MissingTarget, "theory has no registered target");
  if (n.dim_in() == theory.dimIn && n.dim_out() == theory.dimOut) return theory;
  return theory.with_dims(n.dim_in(), n.dim_out());
}

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in [0, 1)");
}

std::string tag(const char* kind, int number) { return std::string(kind) + std::to_string(number); }

}  // namespace

std::string_view token(Task task) { return task == Task::Distill ? "distill" : "dilute"; }

Task parse_task(std::string_view t) {
  const std::string s = lower_case(t);
  if (s == "distill" || s == "distillation") return Task::Distill;
  if (s == "dilute" || s == "dilution") return Task::Dilute;
  throw Error(ErrorCode::ParseError, "unknown task '" + std::string(t) + "'");
}

std::string RateBounds::theorem_tag() const { return "lower:" + lowerTag + ";upper:" + upperTag; }

bool RateBounds::has_flag(std::string_view f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

int search_max_n(double value, const std::function<double(int)>& m, int cap, double snap, bool* capped) {
  if (capped) *capped = false;
  int best = 0;
  for (int n = 1; n <= cap; ++n) {
    const double mn = m(n);
    const double bound = mn > 0.0 ? value / mn : kInf;
    if (n <= bound + snap) best = n;
  }
  if (capped && best == cap) *capped = true;
  return best;
}

int search_min_n(double value, const std::function<double(int)>& m, int cap, double snap) {
  if (value <= snap) return 0;
  for (int n = 1; n <= cap; ++n) {
    const double mn = m(n);
    const double bound = mn > 0.0 ? value / mn : kInf;
    if (n >= bound - snap) return n;
  }
  return -1;
}

RateBounds distill_bounds(const ChannelSpec& n, const TheorySpec& theory, double eps, const RateOptions& opts) {
  check_eps(eps);
  const TheorySpec thN = theory_for_channel(n, theory);
  RateBounds b;
  b.task = Task::Distill;
  b.epsilon = eps;
  TargetM m(theory, opts, b);
  const bool unitary = theory.targetKind == TargetKind::Unitary;
  const bool finite = theory.robustnessFinite;

  const HInterval iv = dh_channel_interval(n.choi(), thN, eps, opts.seesaw);
  add_input(b, "H(N).lo", iv.lo);
  add_input(b, "H(N).hi", iv.hi);

  // converse: n <= D_H / m_H (unitary) or D_H / m_Hhat (preparation)
  const Measure conv = unitary ? Measure::H : Measure::Hhat;
  const Measure ach = Measure::LR;
  const bool collapse = finite && m.registered(ach) && m.registered(conv) && *m.constant(ach) == *m.constant(conv);
  bool capped = false;
  if (auto c = m.constant(conv)) {
    b.nUpper = static_cast<int>(std::floor(iv.hi.value / *c + opts.tie()));
  } else {
    b.nUpper = search_max_n(iv.hi.value, [&](int k) { return m(conv, k); }, opts.nCap, opts.tie(), &capped);
    if (capped) {
      b.nUpper.reset();
      m.flag("n-cap-reached");
    }
  }
  const int thm = unitary ? (finite ? 1 : 3) : (finite ? 5 : 7);
  b.upperTag = collapse ? tag("cor", unitary ? 1 : 4) : tag("thm", thm);

  if (!finite) {
    b.nLower = 0;
    b.lowerTag = "trivial";
  } else {
    double value = iv.lo.value;
    if (!unitary) {
      const MonotoneReport ht = dh_choi(n.choi(), thN, eps);
      add_input(b, "Htilde(N)", ht);
      value = ht.value;
    }
    if (auto c = m.constant(ach)) {
      b.nLower = static_cast<int>(std::floor(value / *c + opts.tie()));
    } else {
      b.nLower = search_max_n(value, [&](int k) { return m(ach, k); }, opts.nCap, opts.tie(), &capped);
      if (capped) m.flag("n-cap-reached");
    }
    b.lowerTag = collapse ? tag("cor", unitary ? 1 : 4) : tag("thm", thm);
  }
  finish_flags(b);
  return b;
}

RateBounds dilute_bounds(const ChannelSpec& n, const TheorySpec& theory, double eps, const RateOptions& opts) {
  check_eps(eps);
  const TheorySpec thN = theory_for_channel(n, theory);
  RateBounds b;
  b.task = Task::Dilute;
  b.epsilon = eps;
  TargetM m(theory, opts, b);
  const bool unitary = theory.targetKind == TargetKind::Unitary;
  const bool finite = theory.robustnessFinite;

  MonotoneReport v;
  Measure lowM, upM;
  int thm = 0, cor = 0;
  if (finite) {
    v = log_robustness(n.choi(), thN, eps);
    add_input(b, "LR(N)", v);
    lowM = Measure::LR;
    upM = unitary ? Measure::H : Measure::Htilde;
    thm = unitary ? 2 : 6;
    cor = unitary ? 2 : 5;
  } else {
    v = dmax(n.choi(), thN, eps);
    add_input(b, "max(N)", v);
    lowM = Measure::Max;
    upM = Measure::Htilde;
    thm = unitary ? 4 : 8;
    cor = unitary ? 3 : 6;
  }
  const bool collapse = m.registered(lowM) && m.registered(upM) && *m.constant(lowM) == *m.constant(upM);
  b.lowerTag = collapse ? tag("cor", cor) : tag("thm", thm);
  b.upperTag = b.lowerTag;

  if (std::isinf(v.value)) {
    b.nLower = opts.nCap;
    b.nUpper.reset();
    m.flag("infinite-input");
    b.diagnostic = "the channel's measure is infinite";
    finish_flags(b);
    return b;
  }

  auto lower = [&](int k) { return m(lowM, k); };
  auto upper = [&](int k) { return m(upM, k, true); };
  if (auto c = m.constant(lowM)) {
    b.nLower = v.value <= opts.tie() ? 0 : static_cast<int>(std::ceil(v.value / *c - opts.tie()));
  } else {
    b.nLower = search_min_n(v.value, lower, opts.nCap, opts.tie());
    if (b.nLower < 0) {
      b.nLower = opts.nCap;
      m.flag("n-cap-reached");
    }
  }
  int nu;
  if (auto c = m.constant(upM)) {
    nu = v.value <= opts.tie() ? 0 : static_cast<int>(std::ceil(v.value / *c - opts.tie()));
  } else {
    nu = search_min_n(v.value, upper, opts.nCap, opts.tie());
  }
  if (nu < 0) {
    m.flag("n-cap-reached");
    b.nUpper.reset();
  } else {
    b.nUpper = nu;
  }

  if (!finite && b.nUpper && *b.nUpper > 0) {
    // the converse construction needs a constant overlap with the target copies
    const int copies = *b.nUpper;
    std::optional<ConstantTrace> ct;
    const double size = std::pow(static_cast<double>(theory.target->dim_in() * theory.target->dim_out()), copies);
    if (size <= kSdpChoiDimGuard) ct = constant_trace_check(theory, copies);
    std::ostringstream d;
    if (!ct) {
      d << "constant-trace condition not checkable at n=" << copies << " (dimension guard)";
      m.flag("constant-trace-unchecked");
    } else if (!ct->constant) {
      d << "constant-trace condition fails at n=" << copies << ": Tr ranges over [" << ct->minValue << ", "
        << ct->maxValue << "]";
      m.flag("constant-trace-fails");
    }
    if (!d.str().empty()) {
      b.diagnostic = d.str();
      if (!collapse) b.nUpper.reset();
    }
  }
  finish_flags(b);
  return b;
}

RateBounds rate_bounds(Task task, const ChannelSpec& n, const TheorySpec& theory, double eps,
                       const RateOptions& opts) {
  return task == Task::Distill ? distill_bounds(n, theory, eps, opts) : dilute_bounds(n, theory, eps, opts);
}

ConstantTrace constant_trace_check(const TheorySpec& theory, int n) {
  if (!theory.target) throw Error(ErrorCode::MissingTarget, "theory has no registered target");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const ChoiMatrix tn = n == 1 ? theory.target->choi() : tensor_power(theory.target->choi(), n);
  if (tn.dim() > kSdpChoiDimGuard) {
    throw Error(ErrorCode::DimensionGuardExceeded, "target copies exceed the semidefinite guard");
  }
  const TheorySpec thn = n == 1 ? theory : theory.power(n);

  auto extreme = [&](bool maximize) {
    conic::Problem p;
    auto x = p.hermitian("X", tn.dim(), false);
    free_cone(thn).impose(p, x);
    p.equal(x.trace(), conic::ScalarExpr(1.0));
    if (maximize) {
      p.maximize(x.inner(tn.matrix()));
    } else {
      p.minimize(x.inner(tn.matrix()));
    }
    const auto sol = p.solve();
    if (sol.status != conic::Status::Optimal && sol.status != conic::Status::Inaccurate) {
      throw Error(ErrorCode::SolverFailure, std::string("constant-trace program: ") + conic::to_string(sol.status));
    }
    return sol.objective;
  };
  ConstantTrace out;
  out.maxValue = extreme(true);
  out.minValue = extreme(false);
  out.constant = out.maxValue - out.minValue <= kConstantTraceTol;
  return out;
}

AsymptoticEstimate asymptotic_estimate(const ChannelSpec& n, const TheorySpec& theory, int nMax, Measure measure,
                                       const SeesawOptions& opts) {
  if (nMax < 1) throw Error(ErrorCode::InvalidArgument, "nMax must be positive");
  if (nMax > 2) throw Error(ErrorCode::DimensionGuardExceeded, "finite-n estimates stop at two copies");
  const TheorySpec th =
      n.dim_in() == theory.dimIn && n.dim_out() == theory.dimOut ? theory : theory.with_dims(n.dim_in(), n.dim_out());
  AsymptoticEstimate out;
  out.measure = measure;
  for (int k = 1; k <= nMax; ++k) {
    const ChoiMatrix nk = k == 1 ? n.choi() : tensor_power(n.choi(), k);
    if (nk.dim() > kSdpChoiDimGuard) {
      throw Error(ErrorCode::DimensionGuardExceeded, "channel copies exceed the semidefinite guard");
    }
    const MonotoneReport r = evaluate(measure, nk, k == 1 ? th : th.power(k), 0.0, opts);
    out.perCopy.push_back(r.value / k);
    out.kinds.push_back(r.boundKind);
  }
  if (theory.id == Theory::Purity) {
    const EntropyReport s = channel_entropy(n.choi());
    out.channelEntropy = s.value;
    out.anchor = s.value / 2.0;
  }
  return out;
}

std::string rates_csv_header() { return "task,theory,target,epsilon,n_lower,n_upper,theorem_tag,flags"; }

std::string rates_csv_row(const TheorySpec& theory, const RateBounds& b) {
  std::string flags;
  for (const auto& f : b.flags) flags += (flags.empty() ? "" : ";") + f;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%s,%.6g,%d,%s,%s,%s", std::string(token(b.task)).c_str(),
                std::string(token(theory.id)).c_str(), theory.targetName.c_str(), b.epsilon, b.nLower,
                b.nUpper ? std::to_string(*b.nUpper).c_str() : "inf", b.theorem_tag().c_str(), flags.c_str());
  return buf;
}

}  // namespace chanres
