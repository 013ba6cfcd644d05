#include "pcnrm/simulator.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "pcnrm/error.h"

namespace pcnrm {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SubstreamSeed(std::uint64_t seed, std::uint64_t replication,
                            std::uint64_t segment) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ replication) ^ segment);
}

std::vector<Arrival> GenerateArrivals(const Instance& instance, double multiplier,
                                      std::uint64_t seed, std::uint64_t replication) {
  if (!(multiplier >= 0.0)) throw InputError("rate multiplier must be nonnegative");
  std::vector<Arrival> out;
  const double tau = instance.horizon();
  for (int l = 0; l < instance.num_segments(); ++l) {
    const Segment& seg = instance.segment(l);
    const double rate = seg.rate * multiplier;
    if (rate <= 0.0) continue;
    std::mt19937_64 rng(SubstreamSeed(seed, replication, static_cast<std::uint64_t>(l)));
    std::exponential_distribution<double> gap(rate);
    double t = gap(rng);
    while (t <= tau) {
      out.push_back({t, l, SampleDepth(seg, rng)});
      t += gap(rng);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) {
    return a.time < b.time || (a.time == b.time && a.segment < b.segment);
  });
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

struct Replication {
  double revenue = 0.0;
  double remaining = 1.0;  // sum x / sum c
  std::vector<int> sales;
  double policy_seconds = 0.0;
  OfferTrace trace;
};

void CheckConfig(const Instance& instance, const SimConfig& config) {
  if (config.evaluations < 1) throw InputError("evaluations must be at least 1");
  double prev = 0.0;
  for (double c : config.checkpoints) {
    if (!(c > prev && c < instance.horizon())) {
      throw InputError("checkpoints must be increasing and strictly inside (0, horizon)");
    }
    prev = c;
  }
}

Replication RunOne(const Instance& instance, const Policy& initial,
                   const Reoptimizer* reoptimize, const SimConfig& config,
                   std::uint64_t replication) {
  const int n = instance.num_products();
  Replication rep;
  rep.sales.assign(n, 0);
  std::vector<int> x = instance.capacities();
  double revenue = 0.0;

  const std::vector<Arrival> arrivals =
      GenerateArrivals(instance, config.rate_multiplier, config.seed, replication);

  // Current policy, its time origin and the sales counter it sees.
  std::unique_ptr<Policy> owned;
  const Policy* policy = &initial;
  double origin = 0.0;
  std::vector<int> sales_since(n, 0);
  std::vector<char> closed(n, 0);
  bool any_closed = false;
  std::size_t next_checkpoint = 0;
  const std::vector<double> none;
  const std::vector<double>& checkpoints = reoptimize ? config.checkpoints : none;

  auto offered_at = [&](double t) {
    PolicyState state{t - origin, x, sales_since};
    Offer s = policy->Available(instance, state);
    if (any_closed) {
      for (int j = 0; j < n; ++j) {
        if (closed[j]) s.erase(j);
      }
    }
    return s;
  };

  auto reoptimize_at = [&](double tc) {
    const auto start = Clock::now();
    if (!config.allow_reopening) {
      const Offer open = offered_at(tc);
      for (int j = 0; j < n; ++j) {
        if (!open.contains(j)) {
          closed[j] = 1;
          any_closed = true;
        }
      }
    }
    const Instance residual =
        instance.WithCapacities(x).WithHorizon(instance.horizon() - tc);
    owned = std::make_unique<Policy>((*reoptimize)(residual, closed));
    policy = owned.get();
    origin = tc;
    std::fill(sales_since.begin(), sales_since.end(), 0);
    rep.policy_seconds += Seconds(Clock::now() - start);
  };

  for (const Arrival& a : arrivals) {
    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= a.time) {
      reoptimize_at(checkpoints[next_checkpoint++]);
    }
    const auto start = Clock::now();
    const Offer s = offered_at(a.time);
    rep.policy_seconds += Seconds(Clock::now() - start);
    if (config.keep_traces) rep.trace.emplace_back(a.time, s);
    const std::optional<int> choice = ChooseWithDepth(instance.segment(a.segment), s, a.depth);
    if (!choice) continue;
    const int j = *choice;
    bool ok = true;
    for (int i : instance.product_resources(j)) ok = ok && x[i] >= 1;
    if (!ok) continue;
    for (int i : instance.product_resources(j)) --x[i];
    ++rep.sales[j];
    ++sales_since[j];
    revenue += instance.fare(j);
  }
  rep.revenue = revenue;
  const int total = instance.total_capacity();
  if (total > 0) {
    int left = 0;
    for (int v : x) left += v;
    rep.remaining = static_cast<double>(left) / total;
  }
  return rep;
}

SimResult Run(const Instance& instance, const Policy& initial, const Reoptimizer* reopt,
              const SimConfig& config) {
  CheckConfig(instance, config);
  const auto start = Clock::now();
  const int reps = config.evaluations;
  std::vector<Replication> results(reps);
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, reps);

  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](int w) {
    try {
      for (int r = w; r < reps; r += threads) {
        results[r] = RunOne(instance, initial, reopt, config, static_cast<std::uint64_t>(r));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SimResult out;
  out.replications = reps;
  out.mean_sales.assign(instance.num_products(), 0.0);
  double sum = 0.0, remaining = 0.0;
  for (const Replication& r : results) {
    sum += r.revenue;
    remaining += r.remaining;
    out.policy_seconds += r.policy_seconds;
    for (int j = 0; j < instance.num_products(); ++j) out.mean_sales[j] += r.sales[j];
    out.revenues.push_back(r.revenue);
  }
  out.mean_revenue = sum / reps;
  for (double& s : out.mean_sales) s /= reps;
  out.cf_remaining = remaining / reps;
  out.cf_consumed = 1.0 - out.cf_remaining;
  if (reps > 1) {
    double ss = 0.0;
    for (const Replication& r : results) {
      ss += (r.revenue - out.mean_revenue) * (r.revenue - out.mean_revenue);
    }
    out.sd_revenue = std::sqrt(ss / (reps - 1));
  }
  out.half_width = 1.96 * out.sd_revenue / std::sqrt(static_cast<double>(reps));
  out.ci_valid = reps >= 30;
  if (config.keep_traces) {
    for (Replication& r : results) out.traces.push_back(std::move(r.trace));
  }
  out.wall_seconds = Seconds(Clock::now() - start);
  return out;
}

}  // namespace

SimResult Simulate(const Instance& instance, const Policy& policy, const SimConfig& config) {
  return Run(instance, policy, nullptr, config);
}

SimResult SimulateReoptimizing(const Instance& instance, const Policy& initial,
                               const Reoptimizer& reoptimize, const SimConfig& config) {
  if (!reoptimize) throw InputError("missing re-optimizer");
  return Run(instance, initial, &reoptimize, config);
}

// ---------------------------------------------------------------------------

Policy BuildPolicy(const Instance& instance, const ApproxSolution& solution,
                   PolicyKind kind, const PolicyOptions& options) {
  const int n = instance.num_products();
  switch (kind) {
    case PolicyKind::kPb:
      return Policy::BookingLimits(solution.sales, options.rounding, options.order_seed);
    case PolicyKind::kOp: {
      if (solution.durations.empty()) return Policy::OfferSequence(n, {});
      return OpFromDurations(solution.durations, options.order, {}, options.order_seed);
    }
    case PolicyKind::kPc:
      if (solution.closings) return Policy::ProductClosing(*solution.closings);
      return Policy::ProductClosing(DurationsToClosings(solution.durations, n));
    case PolicyKind::kOd: {
      if (static_cast<int>(solution.duals.size()) != instance.num_resources()) {
        throw InputError("approximation carries no capacity duals");
      }
      auto model = std::make_shared<BidPriceModel>(
          SolveDecomposition(instance, solution.duals, options.beta, options.dp));
      // Refuse up front when a full-capacity query would exceed the limit.
      OfferDynamic(instance, *model, 0.0, instance.capacities(),
                   options.dp.enumeration_limit);
      return Policy::OfferDynamic(std::move(model), options.dp.enumeration_limit);
    }
    case PolicyKind::kDp:
      return Policy::ExactDp(std::make_shared<ValueTable>(SolveExactDp(instance, options.dp)));
    case PolicyKind::kOfferAll:
      return Policy::OfferAll(n);
  }
  throw InputError("unknown policy kind");
}

Reoptimizer MakeReoptimizer(ApproxKind kind, PolicyKind policy, const PcpOptions& pcp,
                            const CdlpOptions& cdlp, const PolicyOptions& options) {
  return [=](const Instance& residual, const std::vector<char>& closed) {
    PcpOptions p = pcp;
    p.warm.reset();
    p.threads = 1;
    for (int j = 0; j < static_cast<int>(closed.size()); ++j) {
      if (closed[j] && std::find(p.closed.begin(), p.closed.end(), j) == p.closed.end()) {
        p.closed.push_back(j);
      }
    }
    if (policy == PolicyKind::kOd) p.compute_duals = true;
    const ApproxSolution sol = SolveApprox(residual, kind, p, cdlp);
    return BuildPolicy(residual, sol, policy, options);
  };
}

namespace {

std::string Reason(const std::exception& e) {
  const std::string what = e.what();
  if (what.find("reopening") != std::string::npos) return "reopening";
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::kCap: return "cap";
      case ErrorCode::kSolver: return "solver";
      case ErrorCode::kInput: return "input";
    }
  }
  return "error";
}

}  // namespace

std::vector<BenchRow> Compare(const Instance& instance, const CompareConfig& config) {
  std::vector<BenchRow> rows;
  const bool wants_od = std::find(config.policies.begin(), config.policies.end(),
                                  PolicyKind::kOd) != config.policies.end();
  for (ApproxKind kind : config.approximations) {
    PcpOptions pcp = config.pcp;
    if (wants_od) pcp.compute_duals = true;
    std::optional<ApproxSolution> sol;
    std::string approx_reason;
    try {
      sol = SolveApprox(instance, kind, pcp, config.cdlp, config.hierarchy);
    } catch (const std::exception& e) {
      approx_reason = Reason(e);
    }
    for (PolicyKind pk : config.policies) {
      BenchRow row;
      row.approximation = ToString(kind);
      row.policy = ToString(pk);
      if (!sol) {
        row.reason = approx_reason;
        rows.push_back(row);
        continue;
      }
      row.approx_ok = true;
      row.objective = sol->objective;
      row.cpu_approx = sol->solve_seconds;
      try {
        const auto start = Clock::now();
        const Policy policy = BuildPolicy(instance, *sol, pk, config.policy);
        const double build = Seconds(Clock::now() - start);
        const SimResult sim = Simulate(instance, policy, config.sim);
        row.cpu_policy = build + sim.policy_seconds;
        row.expected_revenue = sim.mean_revenue;
        row.half_width = sim.half_width;
        row.cf = sim.cf_consumed;
        row.ok = true;
      } catch (const std::exception& e) {
        row.reason = Reason(e);
      }
      rows.push_back(row);
    }
  }
  if (config.include_dp) {
    BenchRow row;
    row.approximation = "DP";
    row.policy = "DP";
    try {
      const auto start = Clock::now();
      auto table = std::make_shared<ValueTable>(SolveExactDp(instance, config.policy.dp));
      row.cpu_approx = Seconds(Clock::now() - start);
      row.approx_ok = true;
      row.objective = table->Value(0, instance.capacities());
      const SimResult sim = Simulate(instance, Policy::ExactDp(table), config.sim);
      row.cpu_policy = sim.policy_seconds;
      row.expected_revenue = sim.mean_revenue;
      row.half_width = sim.half_width;
      row.cf = sim.cf_consumed;
      row.ok = true;
    } catch (const std::exception& e) {
      row.reason = Reason(e);
    }
    rows.push_back(row);
  }

  const BenchRow* ref = nullptr;
  for (const BenchRow& r : rows) {
    if (r.ok && r.approximation == "CDLP" && r.policy == "OP") ref = &r;
  }
  if (ref) {
    const double er = ref->expected_revenue;
    const double cf = ref->cf;
    for (BenchRow& r : rows) {
      if (!r.ok) continue;
      r.delta_cf = 100.0 * (r.cf - cf);
      if (er != 0.0) {
        r.delta_revenue_pct = 100.0 * (r.expected_revenue - er) / er;
        r.has_delta = true;
      }
    }
  }
  if (config.deterministic) {
    for (BenchRow& r : rows) r.cpu_approx = r.cpu_policy = 0.0;
  }
  return rows;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.0" || s == "-0.00" || s == "-0.0000" || s == "-0.000000") s.erase(0, 1);
  return s;
}

std::vector<std::string> Cells(const BenchRow& r, double lf) {
  std::vector<std::string> c{Fixed(lf, 2), r.approximation, r.policy};
  const bool solved = r.approx_ok;
  const std::string na = "n/a(" + r.reason + ")";
  c.push_back(solved ? Fixed(r.objective, 6) : na);
  c.push_back(solved ? Fixed(r.cpu_approx, 4) : na);
  if (!r.ok) {
    for (int k = 0; k < 6; ++k) c.push_back(na);
    return c;
  }
  c.push_back(Fixed(r.cpu_policy, 4));
  c.push_back(Fixed(r.expected_revenue, 4));
  c.push_back(Fixed(r.half_width, 4));
  c.push_back(r.has_delta ? Fixed(r.delta_revenue_pct, 1) : "n/a(reference)");
  c.push_back(Fixed(100.0 * r.cf, 1));
  c.push_back(r.has_delta ? Fixed(r.delta_cf, 1) : "n/a(reference)");
  return c;
}

const std::vector<std::string>& Header() {
  static const std::vector<std::string> h{
      "LF", "approx", "policy", "R", "CPUa", "CPUp", "E[R]", "hw95", "dE[R]%",
      "E[CF]%consumed", "dE[CF]pp"};
  return h;
}

}  // namespace

std::string BenchCsvHeader() {
  std::string out;
  for (std::size_t k = 0; k < Header().size(); ++k) {
    out += (k ? "," : "") + Header()[k];
  }
  return out + "\n";
}

std::string BenchCsv(const std::vector<BenchRow>& rows, double load_factor) {
  std::string out;
  for (const BenchRow& r : rows) {
    const auto cells = Cells(r, load_factor);
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
    out += "\n";
  }
  return out;
}

std::string BenchText(const std::vector<BenchRow>& rows, double load_factor) {
  std::vector<std::vector<std::string>> table{Header()};
  for (const BenchRow& r : rows) table.push_back(Cells(r, load_factor));
  std::vector<std::size_t> width(Header().size(), 0);
  for (const auto& row : table) {
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  std::ostringstream os;
  for (const auto& row : table) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) os << "  ";
      const std::size_t pad = width[k] - row[k].size();
      if (k < 3) {
        os << row[k] << std::string(pad, ' ');
      } else {
        os << std::string(pad, ' ') << row[k];
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace pcnrm
