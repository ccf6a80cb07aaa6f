#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chanres/channel_io.hpp"
#include "chanres/conic.hpp"
#include "chanres/error.hpp"
#include "chanres/rates.hpp"
#include "chanres/superchannels.hpp"
#include "chanres/verify.hpp"

using namespace chanres;

namespace {

enum Exit { kOk = 0, kFailed = 1, kParse = 2, kSolver = 3, kGuard = 4 };

struct RunConfig {
  std::string theory;
  std::vector<std::string> measures;
  std::vector<double> epsilons;
  std::string channel;
  std::string target;
  std::string task;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<double> tol;
  int trials = 100;
  int nMax = 0;
  int channels = 0;
  int restarts = 8;
  std::string offenders;
  bool corrected = false;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string meta(const std::string& command, const RunConfig& c, double tol) {
  const conic::Settings s = conic::default_settings();
  return "# chanres " CHANRES_VERSION " command=" + command + " seed=" + std::to_string(c.seed) + " tol=" + fmt(tol) +
         " solver_tol=" + fmt(s.reltol) + " solver_accepted=" + fmt(s.accepted) +
         " restarts=" + std::to_string(c.restarts);
}

SeesawOptions seesaw(const RunConfig& c) {
  SeesawOptions o;
  o.restarts = c.restarts;
  o.seed = c.seed;
  return o;
}

std::vector<Theory> theories(const RunConfig& c) {
  if (c.theory.empty() || c.theory == "all") return all_theories();
  return {parse_theory(c.theory)};
}

TheorySpec theory_for(const RunConfig& c, const ChannelSpec& n) {
  const Theory id = parse_theory(c.theory);
  if (c.target.empty()) return make_theory(id, n.dim_in(), n.dim_out());
  const TheorySpec th = registered_theory(id, c.target);
  if (th.dimIn == n.dim_in() && th.dimOut == n.dim_out()) return th;
  return th.with_dims(n.dim_in(), n.dim_out());
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

int cmd_monotone(const RunConfig& c, std::vector<std::string>& lines) {
  require(!c.channel.empty() && !c.theory.empty(), "monotone needs --channel and --theory");
  const ChannelSpec n = read_channel(c.channel);
  const TheorySpec th = theory_for(c, n);
  std::vector<Measure> ms;
  for (const auto& m : c.measures) ms.push_back(parse_measure(m));
  if (ms.empty()) ms = {Measure::LR, Measure::Max, Measure::H, Measure::Htilde, Measure::Hhat};
  const std::vector<double> eps = c.epsilons.empty() ? std::vector<double>{0.0} : c.epsilons;
  lines.push_back(meta("monotone", c, c.tol.value_or(0.0)));
  lines.push_back(monotone_csv_header());
  for (double e : eps)
    for (Measure m : ms) {
      if (m == Measure::H) {
        HInterval iv = dh_channel_interval(n.choi(), th, e, seesaw(c));
        iv.lo.measureName = "H.lo";
        iv.hi.measureName = "H.hi";
        lines.push_back(monotone_csv_row(th, iv.lo));
        lines.push_back(monotone_csv_row(th, iv.hi));
      } else {
        lines.push_back(monotone_csv_row(th, evaluate(m, n.choi(), th, e, seesaw(c))));
      }
    }
  return kOk;
}

int cmd_rates(const RunConfig& c, std::vector<std::string>& lines) {
  require(!c.channel.empty() && !c.theory.empty(), "rates needs --channel and --theory");
  const ChannelSpec n = read_channel(c.channel);
  const TheorySpec th = registered_theory(parse_theory(c.theory), c.target);
  RateOptions o;
  o.seesaw = seesaw(c);
  if (c.nMax > 0) o.nCap = c.nMax;
  std::vector<Task> tasks{Task::Distill, Task::Dilute};
  if (!c.task.empty() && c.task != "both") tasks = {parse_task(c.task)};
  const std::vector<double> eps = c.epsilons.empty() ? std::vector<double>{0.0} : c.epsilons;
  lines.push_back(meta("rates", c, o.tie()));
  lines.push_back(rates_csv_header());
  for (double e : eps)
    for (Task t : tasks) lines.push_back(rates_csv_row(th, rate_bounds(t, n, th, e, o)));
  return kOk;
}

int cmd_reproduce(const RunConfig& c, std::vector<std::string>& lines) {
  const double tol = c.tol.value_or(1e-5);
  const auto rows = reproduce_constants(tol, c.nMax != 1, seesaw(c));
  lines.push_back(meta("reproduce", c, tol));
  lines.push_back(repro_csv_header());
  bool ok = true;
  for (const auto& r : rows) {
    lines.push_back(repro_csv_row(r));
    ok = ok && r.pass;
  }
  return ok ? kOk : kFailed;
}

int cmd_verify(const std::string& suite, const RunConfig& c, std::vector<std::string>& lines) {
  std::vector<SuiteReport> reports;
  double tol = 1e-6;
  if (suite == "ordering") {
    OrderingOptions o;
    o.tol = tol = c.tol.value_or(1e-6);
    o.seed = c.seed;
    o.seesaw = seesaw(c);
    o.corrected = c.corrected;
    if (c.channels > 0) o.channels = c.channels;
    if (!c.epsilons.empty()) o.epsilons = c.epsilons;
    for (Theory t : theories(c)) reports.push_back(verify_ordering(t, o));
  } else if (suite == "collapse") {
    tol = c.tol.value_or(1e-5);
    for (Theory t : theories(c)) {
      if (!c.target.empty()) {
        reports.push_back(verify_collapse(t, c.target, true, tol, seesaw(c)));
        continue;
      }
      for (const auto& [id, name] : registered_targets())
        if (id == t && registered_theory(id, name).targetKind == TargetKind::Preparation)
          reports.push_back(verify_collapse(t, name, true, tol, seesaw(c)));
    }
    require(!reports.empty(), "no preparation target registered for this theory");
  } else if (suite == "monotonicity") {
    MonotonicityOptions o;
    o.tol = tol = c.tol.value_or(1e-6);
    o.seed = c.seed;
    o.trials = c.trials;
    o.seesaw = seesaw(c);
    if (c.channels > 0) o.channels = c.channels;
    if (!c.measures.empty()) {
      o.measures.clear();
      for (const auto& m : c.measures) o.measures.push_back(parse_measure(m));
    }
    if (!c.offenders.empty()) o.offenderDir = c.offenders;
    for (Theory t : theories(c)) reports.push_back(verify_monotonicity(t, o));
  } else {
    throw Error(ErrorCode::ParseError, "unknown suite '" + suite + "'");
  }
  lines.push_back(meta("verify " + suite, c, tol));
  lines.push_back(suite_csv_header());
  bool ok = true;
  for (const auto& r : reports) {
    for (auto& row : suite_csv_rows(r)) lines.push_back(std::move(row));
    ok = ok && r.pass();
  }
  return ok ? kOk : kFailed;
}

int cmd_probe(const RunConfig& c, std::vector<std::string>& lines) {
  require(!c.channel.empty() && !c.theory.empty(), "superchannel-probe needs --channel and --theory");
  const ChannelSpec n = read_channel(c.channel);
  const TheorySpec th = theory_for(c, n);
  const double tol = c.tol.value_or(1e-6);
  std::vector<Measure> ms;
  for (const auto& m : c.measures) ms.push_back(parse_measure(m));
  if (ms.empty()) ms = {Measure::Max};
  lines.push_back(meta("superchannel-probe", c, tol));
  lines.push_back(probe_csv_header());
  int violations = 0;
  std::optional<std::filesystem::path> dir;
  if (!c.offenders.empty()) dir = c.offenders;
  for (Measure m : ms) {
    const ProbeReport p = monotonicity_probe(th, m, n, c.trials, c.seed, tol, seesaw(c));
    lines.push_back(monotone_csv_row(th, p.base) + ",base");
    for (auto& row : probe_csv_rows(p, th, dir)) lines.push_back(std::move(row));
    violations += p.violations();
  }
  return violations == 0 ? kOk : kFailed;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFailure:
    case ErrorCode::NumericalFailure: return kSolver;
    case ErrorCode::DimensionGuardExceeded:
    case ErrorCode::UnsupportedDims: return kGuard;
    default: return kParse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource measures and conversion rates for quantum channels"};
  app.require_subcommand(1);
  RunConfig c;
  std::string suite;

  const auto common = [&](CLI::App* s) {
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--out", c.out, "write CSV here instead of stdout");
    s->add_option("--tol", c.tol, "pass/fail tolerance");
    s->add_option("--restarts", c.restarts, "seesaw restarts")->check(CLI::PositiveNumber);
  };
  const auto channel_opts = [&](CLI::App* s) {
    s->add_option("--theory", c.theory, "purity|cc|qc|nu|coh|ent");
    s->add_option("--channel", c.channel, "channel JSON file");
    s->add_option("--target", c.target, "registered target (I2, Had, CNOT, G2, G+, GPhi+)");
    s->add_option("--epsilon", c.epsilons, "smoothing parameter, repeatable")->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* mono = app.add_subcommand("monotone", "evaluate resource measures of a channel");
  channel_opts(mono);
  mono->add_option("--measure", c.measures, "lr|max|h|htilde|hhat, repeatable");
  common(mono);

  CLI::App* rates = app.add_subcommand("rates", "distillation and dilution brackets");
  channel_opts(rates);
  rates->add_option("--task", c.task, "distill|dilute|both");
  rates->add_option("--n-max", c.nMax, "largest n searched")->check(CLI::PositiveNumber);
  common(rates);

  CLI::App* repro = app.add_subcommand("reproduce", "recompute the registered constants");
  repro->add_option("--n-max", c.nMax, "1 or 2 copies")->check(CLI::Range(1, 2));
  common(repro);

  CLI::App* ver = app.add_subcommand("verify", "property suites");
  ver->add_option("suite", suite, "ordering|collapse|monotonicity")->required();
  ver->add_option("--theory", c.theory, "theory token or all");
  ver->add_option("--target", c.target, "collapse target");
  ver->add_option("--epsilon", c.epsilons, "ordering epsilons, repeatable")->check(CLI::Range(0.0, 1.0));
  ver->add_option("--measure", c.measures, "monotonicity measures, repeatable");
  ver->add_option("--trials", c.trials, "superchannels per channel")->check(CLI::PositiveNumber);
  ver->add_option("--channels", c.channels, "random channels per theory")->check(CLI::PositiveNumber);
  ver->add_option("--offenders", c.offenders, "directory for violating superchannels");
  ver->add_flag("--corrected", c.corrected, "also check D_max^0 + log2(1/(1-eps)) >= H.hi");
  common(ver);

  CLI::App* probe = app.add_subcommand("superchannel-probe", "apply random free superchannels to a channel");
  channel_opts(probe);
  probe->add_option("--measure", c.measures, "measure, repeatable");
  probe->add_option("--trials", c.trials, "number of superchannels")->check(CLI::PositiveNumber);
  probe->add_option("--offenders", c.offenders, "directory for violating superchannels");
  common(probe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  std::vector<std::string> lines;
  int rc = kOk;
  try {
    if (*mono) rc = cmd_monotone(c, lines);
    else if (*rates) rc = cmd_rates(c, lines);
    else if (*repro) rc = cmd_reproduce(c, lines);
    else if (*ver) rc = cmd_verify(suite, c, lines);
    else rc = cmd_probe(c, lines);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }

  std::ostringstream text;
  for (const auto& l : lines) text << l << "\n";
  if (c.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << c.out << "\n";
      return kParse;
    }
    f << text.str();
  }
  if (rc != kOk) std::cerr << "one or more checks failed\n";
  return rc;
}
