// pcnrm: command-line front end.
//
//   pcnrm validate DIR
//   pcnrm solve DIR --approx pcmp [--hierarchy price] [--out OUT]
//   pcnrm simulate DIR --approx pcmp --policy pc [--evaluations N]
//   pcnrm bench DIR --lf 0.6,1.0,1.4 [--policies pc,pb,op,od] [--out OUT]
//   pcnrm convert MNL.csv --out segments.csv
//   pcnrm oracle DIR [--dt 0.01]
//
// Exit codes: 0 ok, 2 input error, 3 solver error, 4 cap exceeded.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcnrm/dp.h"
#include "pcnrm/error.h"
#include "pcnrm/io.h"
#include "pcnrm/pcp.h"
#include "pcnrm/simulator.h"

#ifndef PCNRM_VERSION
#define PCNRM_VERSION "unknown"
#endif

namespace {

using namespace pcnrm;
using json = nlohmann::ordered_json;

struct RunConfig {
  std::string instance;
  std::string approx = "pcmp";
  std::string hierarchy = "price";
  std::string nesting;
  std::string policy = "pc";
  std::vector<std::string> approximations{"cdlp", "pcmp", "pclp", "cdpc"};
  std::vector<std::string> policies{"pb", "op", "pc", "od"};
  std::vector<double> load_factors;
  double lf = 0.0;
  int evaluations = 1000;
  std::uint64_t seed = 1;
  int checkpoints = 0;
  bool allow_reopening = false;
  double gap = 1e-3;
  double dt = 0.0;
  double beta = 1.0;
  std::string rounding = "floor";
  std::string order = "lexicographic";
  bool with_dp = false;
  bool deterministic = false;
  bool duals = false;
  std::string out;
  int threads = 0;
  std::int64_t state_cap = 50'000'000;
  int permutation_cap = kDefaultPermutationCap;
};

int DefaultThreads() {
  if (const char* env = std::getenv("PCNRM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

ApproxKind ApproxOrThrow(const std::string& name) {
  const auto kind = ParseApproxKind(name);
  if (!kind) throw InputError("unknown approximation '" + name + "'");
  return *kind;
}

PolicyKind PolicyOrThrow(const std::string& name) {
  const auto kind = ParsePolicyKind(name);
  if (!kind) throw InputError("unknown policy '" + name + "'");
  return *kind;
}

Instance LoadInstance(const RunConfig& cfg) {
  Instance inst = ValidateOrThrow(ReadInstanceDir(cfg.instance));
  if (cfg.lf > 0.0) inst = inst.WithLoadFactor(cfg.lf);
  return inst;
}

std::vector<int> NestingOrder(const Instance& inst, const std::string& ids) {
  std::vector<int> order;
  std::stringstream ss(ids);
  std::string id;
  while (std::getline(ss, id, ';')) {
    const auto j = inst.FindProduct(id);
    if (!j) throw InputError("nesting names unknown product '" + id + "'");
    order.push_back(*j);
  }
  return order;
}

PcpOptions MakePcp(const RunConfig& cfg) {
  PcpOptions p;
  p.gap = cfg.gap;
  p.threads = cfg.threads;
  p.compute_duals = cfg.duals;
  return p;
}

std::optional<Hierarchy> MakeHierarchyFor(const Instance& inst, const RunConfig& cfg) {
  const auto rule = ParseHierarchyRule(cfg.hierarchy);
  if (!rule) throw InputError("unknown hierarchy rule '" + cfg.hierarchy + "'");
  std::optional<ClosingTimes> closing;
  if (*rule == HierarchyRule::kFromSolution) {
    PcpOptions plain = MakePcp(cfg);
    plain.compute_duals = false;
    closing = SolvePcmp(inst, plain).closings;
  }
  return MakeHierarchy(inst, *rule, closing,
                       *rule == HierarchyRule::kUserNesting ? NestingOrder(inst, cfg.nesting)
                                                            : std::vector<int>{});
}

PolicyOptions MakePolicyOptions(const RunConfig& cfg) {
  PolicyOptions o;
  if (cfg.rounding == "probabilistic") {
    o.rounding = LimitRounding::kProbabilistic;
  } else if (cfg.rounding != "floor") {
    throw InputError("rounding must be floor or probabilistic");
  }
  if (cfg.order == "random") {
    o.order = OfferOrder::kRandom;
  } else if (cfg.order != "lexicographic") {
    throw InputError("order must be lexicographic or random");
  }
  o.order_seed = cfg.seed;
  o.beta = cfg.beta;
  o.dp.dt = cfg.dt;
  o.dp.state_cap = cfg.state_cap;
  return o;
}

std::vector<double> Checkpoints(const Instance& inst, int count) {
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(inst.horizon() * k / (count + 1));
  return out;
}

json ConfigJson(const RunConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["instance"] = cfg.instance;
  j["approx"] = cfg.approx;
  j["hierarchy"] = cfg.hierarchy;
  j["policy"] = cfg.policy;
  j["approximations"] = cfg.approximations;
  j["policies"] = cfg.policies;
  j["load_factors"] = cfg.load_factors;
  j["lf"] = cfg.lf;
  j["evaluations"] = cfg.evaluations;
  j["seed"] = cfg.seed;
  j["checkpoints"] = cfg.checkpoints;
  j["allow_reopening"] = cfg.allow_reopening;
  j["gap"] = cfg.gap;
  j["dt"] = cfg.dt;
  j["beta"] = cfg.beta;
  j["rounding"] = cfg.rounding;
  j["order"] = cfg.order;
  j["dp"] = cfg.with_dp;
  j["deterministic"] = cfg.deterministic;
  return j;
}

void WriteManifest(const RunConfig& cfg, const std::string& command) {
  if (cfg.out.empty()) return;
  fs::create_directories(cfg.out);
  json m;
  m["version"] = PCNRM_VERSION;
  m["config"] = ConfigJson(cfg, command);
  std::ofstream(fs::path(cfg.out) / "manifest.json") << m.dump(2) << "\n";
}

void AppendLog(const RunConfig& cfg, const json& entry) {
  if (cfg.out.empty()) return;
  fs::create_directories(cfg.out);
  std::ofstream(fs::path(cfg.out) / "run.jsonl", std::ios::app) << entry.dump() << "\n";
}

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int CmdValidate(const RunConfig& cfg) {
  const ValidationResult res = Validate(ReadInstanceDir(cfg.instance));
  if (!res.ok()) {
    for (const Violation& v : res.violations) std::cerr << v.message << "\n";
    return static_cast<int>(ErrorCode::kInput);
  }
  const Instance& inst = *res.instance;
  std::cout << "ok resources=" << inst.num_resources() << " products=" << inst.num_products()
            << " segments=" << inst.num_segments() << " LF=" << Fixed6(inst.load_factor())
            << "\n";
  return 0;
}

int CmdSolve(const RunConfig& cfg) {
  const Instance inst = LoadInstance(cfg);
  const ApproxKind kind = ApproxOrThrow(cfg.approx);
  const auto hierarchy = kind == ApproxKind::kPclp ? MakeHierarchyFor(inst, cfg) : std::nullopt;
  const ApproxSolution sol = SolveApprox(inst, kind, MakePcp(cfg), {}, hierarchy);
  WriteManifest(cfg, "solve");
  if (!cfg.out.empty()) {
    const fs::path out = cfg.out;
    if (sol.closings) WriteClosingsCsv(inst, *sol.closings, out / "closings.csv");
    WriteDurationsCsv(inst, sol.durations, out / "durations.csv");
    if (!sol.duals.empty()) WriteDualsCsv(inst, sol.duals, out / "duals.csv");
    WriteSalesCsv(inst, sol.sales, out / "sales.csv");
    json log;
    log["command"] = "solve";
    log["approx"] = ToString(kind);
    log["objective"] = sol.objective;
    log["wall_seconds"] = cfg.deterministic ? 0.0 : sol.solve_seconds;
    log["iterations"] = sol.iterations;
    log["nodes"] = sol.nodes;
    log["gap"] = sol.gap;
    AppendLog(cfg, log);
  }
  std::cout << "R=" << Fixed6(sol.objective) << "\n";
  return 0;
}

int CmdSimulate(const RunConfig& cfg) {
  const Instance inst = LoadInstance(cfg);
  const PolicyKind pk = PolicyOrThrow(cfg.policy);
  const PolicyOptions popts = MakePolicyOptions(cfg);
  SimConfig sim;
  sim.evaluations = cfg.evaluations;
  sim.seed = cfg.seed;
  sim.threads = cfg.threads;
  sim.allow_reopening = cfg.allow_reopening;
  sim.checkpoints = Checkpoints(inst, cfg.checkpoints);

  SimResult res;
  double objective = 0.0;
  std::string approx = "DP";
  if (pk == PolicyKind::kDp) {
    auto table = std::make_shared<ValueTable>(SolveExactDp(inst, popts.dp));
    objective = table->Value(0, inst.capacities());
    res = Simulate(inst, Policy::ExactDp(table), sim);
  } else {
    const ApproxKind kind = ApproxOrThrow(cfg.approx);
    approx = ToString(kind);
    PcpOptions pcp = MakePcp(cfg);
    if (pk == PolicyKind::kOd) pcp.compute_duals = true;
    const auto hierarchy = kind == ApproxKind::kPclp ? MakeHierarchyFor(inst, cfg) : std::nullopt;
    const ApproxSolution sol = SolveApprox(inst, kind, pcp, {}, hierarchy);
    objective = sol.objective;
    const Policy policy = BuildPolicy(inst, sol, pk, popts);
    if (!cfg.out.empty()) WritePolicyCsv(inst, policy, cfg.out);
    res = sim.checkpoints.empty()
              ? Simulate(inst, policy, sim)
              : SimulateReoptimizing(inst, policy, MakeReoptimizer(kind, pk, pcp, {}, popts), sim);
  }
  WriteManifest(cfg, "simulate");
  json log;
  log["command"] = "simulate";
  log["approx"] = approx;
  log["policy"] = ToString(pk);
  log["objective"] = objective;
  log["expected_revenue"] = res.mean_revenue;
  log["half_width"] = res.half_width;
  log["cf_consumed"] = res.cf_consumed;
  log["cf_remaining"] = res.cf_remaining;
  log["replications"] = res.replications;
  log["wall_seconds"] = cfg.deterministic ? 0.0 : res.wall_seconds;
  AppendLog(cfg, log);
  std::cout << "R=" << Fixed6(objective) << " E[R]=" << Fixed6(res.mean_revenue)
            << " hw95=" << Fixed6(res.half_width) << (res.ci_valid ? "" : "(n<30)")
            << " CF_consumed=" << Fixed6(res.cf_consumed)
            << " CF_remaining=" << Fixed6(res.cf_remaining) << "\n";
  return 0;
}

int CmdBench(const RunConfig& cfg) {
  const Instance base = ValidateOrThrow(ReadInstanceDir(cfg.instance));
  CompareConfig cc;
  cc.approximations.clear();
  for (const std::string& a : cfg.approximations) cc.approximations.push_back(ApproxOrThrow(a));
  cc.policies.clear();
  for (const std::string& p : cfg.policies) cc.policies.push_back(PolicyOrThrow(p));
  cc.include_dp = cfg.with_dp;
  cc.sim.evaluations = cfg.evaluations;
  cc.sim.seed = cfg.seed;
  cc.sim.threads = cfg.threads;
  cc.pcp = MakePcp(cfg);
  cc.policy = MakePolicyOptions(cfg);
  cc.deterministic = cfg.deterministic;

  std::vector<double> lfs = cfg.load_factors;
  if (lfs.empty()) lfs.push_back(base.load_factor());
  std::string csv = BenchCsvHeader();
  std::string text;
  std::string plot = "LF,approx,policy,dE[R]%\n";
  for (double lf : lfs) {
    if (!(lf > 0.0)) throw InputError("load factors must be positive");
    const Instance inst = base.WithLoadFactor(lf);
    if (cc.approximations.end() !=
        std::find(cc.approximations.begin(), cc.approximations.end(), ApproxKind::kPclp)) {
      RunConfig sub = cfg;
      cc.hierarchy = MakeHierarchyFor(inst, sub);
    }
    const std::vector<BenchRow> rows = Compare(inst, cc);
    csv += BenchCsv(rows, lf);
    char title[64];
    std::snprintf(title, sizeof title, "LF = %.2f\n", lf);
    text += title + BenchText(rows, lf) + "\n";
    for (const BenchRow& r : rows) {
      if (!r.ok || !r.has_delta) continue;
      char line[160];
      std::snprintf(line, sizeof line, "%.2f,%s,%s,%.1f\n", lf, r.approximation.c_str(),
                    r.policy.c_str(), r.delta_revenue_pct);
      plot += line;
    }
  }
  std::cout << text;
  WriteManifest(cfg, "bench");
  if (!cfg.out.empty()) {
    const fs::path out = cfg.out;
    std::ofstream(out / "bench.csv") << csv;
    std::ofstream(out / "bench.txt") << text;
    std::ofstream(out / "plot.csv") << plot;
    json log;
    log["command"] = "bench";
    log["load_factors"] = lfs;
    log["rows"] = static_cast<int>(std::count(csv.begin(), csv.end(), '\n')) - 1;
    AppendLog(cfg, log);
  }
  return 0;
}

int CmdConvert(const RunConfig& cfg) {
  const MnlSegment seg = ReadMnlCsv(cfg.instance);
  const MnlConversion conv = MnlToRanking(seg, cfg.permutation_cap);
  if (cfg.out.empty()) throw InputError("convert needs --out");
  const fs::path out = cfg.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  WriteSegmentsCsv(conv.lists, out);
  std::cout << "segments=" << conv.lists.size() << "\n";
  return 0;
}

int CmdOracle(const RunConfig& cfg) {
  const Instance inst = LoadInstance(cfg);
  DpOptions opts;
  opts.dt = cfg.dt;
  opts.state_cap = cfg.state_cap;
  const auto start = std::chrono::steady_clock::now();
  const ValueTable table = SolveExactDp(inst, opts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double v = table.Value(0, inst.capacities());
  WriteManifest(cfg, "oracle");
  json log;
  log["command"] = "oracle";
  log["value"] = v;
  log["dt"] = table.dt();
  log["steps"] = table.steps();
  log["states"] = table.num_states();
  log["wall_seconds"] = cfg.deterministic ? 0.0 : secs;
  AppendLog(cfg, log);
  std::cout << "V=" << Fixed6(v) << " dt=" << table.dt() << " steps=" << table.steps() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product-closing network revenue management toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PCNRM_VERSION);
  RunConfig cfg;
  cfg.threads = DefaultThreads();

  auto add_common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("instance", cfg.instance, what)->required();
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--threads", cfg.threads, "Worker threads (default $PCNRM_THREADS or all)");
    sub->add_flag("--deterministic", cfg.deterministic, "Zero wall-clock fields in outputs");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--approx", cfg.approx, "cdlp | pcmp | pclp | cdpc");
    sub->add_option("--hierarchy", cfg.hierarchy,
                    "price | price-per-resource | from-solution | user-nesting");
    sub->add_option("--nesting", cfg.nesting, "Products highest first, ';'-separated");
    sub->add_option("--gap", cfg.gap, "Relative MIP gap");
    sub->add_option("--lf", cfg.lf, "Rescale arrival rates to this load factor");
  };

  CLI::App* validate = app.add_subcommand("validate", "Check an instance directory");
  add_common(validate, "Instance directory");

  CLI::App* solve = app.add_subcommand("solve", "Solve one approximation");
  add_common(solve, "Instance directory");
  add_solver(solve);
  solve->add_flag("--duals", cfg.duals, "Finite-difference duals for PC programs");

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one policy");
  add_common(simulate, "Instance directory");
  add_solver(simulate);
  simulate->add_option("--policy", cfg.policy, "pb | op | pc | od | dp");
  simulate->add_option("--evaluations", cfg.evaluations, "Replications");
  simulate->add_option("--seed", cfg.seed, "Master seed");
  simulate->add_option("--checkpoints", cfg.checkpoints, "Equally spaced re-optimizations");
  simulate->add_flag("--allow-reopening", cfg.allow_reopening, "Let re-optimization reopen");
  simulate->add_option("--rounding", cfg.rounding, "PB limits: floor | probabilistic");
  simulate->add_option("--order", cfg.order, "OP ordering: lexicographic | random");
  simulate->add_option("--beta", cfg.beta, "OD blend between decomposition and duals");
  simulate->add_option("--dt", cfg.dt, "DP time step");

  CLI::App* bench = app.add_subcommand("bench", "Approximation x policy grid");
  add_common(bench, "Instance directory");
  bench->add_option("--lf", cfg.load_factors, "Load factors")->delimiter(',');
  bench->add_option("--approx", cfg.approximations, "Approximations")->delimiter(',');
  bench->add_option("--policies", cfg.policies, "Policies")->delimiter(',');
  bench->add_option("--hierarchy", cfg.hierarchy, "PCLP hierarchy rule");
  bench->add_option("--nesting", cfg.nesting, "Products highest first, ';'-separated");
  bench->add_option("--gap", cfg.gap, "Relative MIP gap");
  bench->add_option("--evaluations", cfg.evaluations, "Replications");
  bench->add_option("--seed", cfg.seed, "Master seed");
  bench->add_option("--rounding", cfg.rounding, "PB limits: floor | probabilistic");
  bench->add_option("--order", cfg.order, "OP ordering: lexicographic | random");
  bench->add_option("--beta", cfg.beta, "OD blend between decomposition and duals");
  bench->add_option("--dt", cfg.dt, "DP time step");
  bench->add_flag("--dp", cfg.with_dp, "Add the exact DP row");

  CLI::App* convert = app.add_subcommand("convert", "MNL segment to ranking segments");
  convert->add_option("mnl", cfg.instance, "MNL CSV (product,weight)")->required();
  convert->add_option("--out", cfg.out, "segments.csv to write")->required();
  convert->add_option("--cap", cfg.permutation_cap, "Largest product count enumerated");

  CLI::App* oracle = app.add_subcommand("oracle", "Exact DP value");
  add_common(oracle, "Instance directory");
  oracle->add_option("--dt", cfg.dt, "Time step (default tau / ceil(10 sum lambda tau))");
  oracle->add_option("--state-cap", cfg.state_cap, "Largest steps x states");
  oracle->add_option("--lf", cfg.lf, "Rescale arrival rates to this load factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::kInput);
  }

  try {
    if (*validate) return CmdValidate(cfg);
    if (*solve) return CmdSolve(cfg);
    if (*simulate) return CmdSimulate(cfg);
    if (*bench) return CmdBench(cfg);
    if (*convert) return CmdConvert(cfg);
    if (*oracle) return CmdOracle(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::kSolver);
  }
  return 0;
}
