#include "prisched/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "prisched/decomposition.hpp"
#include "prisched/delay.hpp"
#include "prisched/engine.hpp"
#include "prisched/formats.hpp"

namespace prisched {

namespace fs = std::filesystem;

namespace {

std::string links_text(std::span<const int> links) {
  std::string s;
  for (std::size_t k = 0; k < links.size(); ++k) s += (k ? " " : "") + std::to_string(links[k] + 1);
  return s;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

const Traffic& need_traffic(const Scenario& sc) {
  if (!sc.traffic) throw InputError(sc.source + ": missing section [traffic]");
  return *sc.traffic;
}

std::uint64_t need_seed(const Scenario& sc) {
  if (!sc.sim.seed) throw InputError(sc.source + ": [sim]: missing field 'seed' (or pass --seed)");
  return *sc.sim.seed;
}

fs::path output_path(const Scenario& sc, const CommandOptions& opts, const std::string& name) {
  fs::path dir = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(sc.out.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir / name;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InputError("cannot write '" + p.string() + "'");
  return os;
}

void finish_output(std::ofstream& os, const fs::path& p) {
  os.flush();
  if (!os) throw InputError("write failed for '" + p.string() + "'");
}

Priority priority_from_lines(const Scenario& sc) {
  const int n = sc.size();
  std::vector<int> ranks(n, 0);
  for (auto [link, rank] : sc.scheduler.priority_lines) {
    if (ranks[link]) throw InputError("[scheduler]: link " + std::to_string(link + 1) + " has two priority lines");
    ranks[link] = rank;
  }
  for (int i = 0; i < n; ++i)
    if (!ranks[i]) throw InputError("[scheduler]: missing 'priority " + std::to_string(i + 1) + " <rank>'");
  return Priority(std::move(ranks));
}

Decomposition read_decomposition_file(const Scenario& sc, const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) p = fs::path(sc.base_dir) / p;
  std::ifstream in(p);
  if (!in) throw InputError("cannot open decomposition '" + p.string() + "'");
  try {
    return parse_decomposition(in, sc.size());
  } catch (const InputError& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

// Exact unless the scenario asks for the approximate scheme.
std::variant<Decomposition, Infeasible> synthesize_decomposition(const Scenario& sc) {
  const auto a = sc.rates();
  double eps = 0.0;
  if (sc.scheduler.epsilon) {
    eps = *sc.scheduler.epsilon;
  } else {
    auto d = default_epsilon(sc.graph, a, sc.limits);
    if (!d) return Infeasible{"rates are not strictly inside the maximal-set hull; no positive epsilon exists"};
    eps = *d;
  }
  DecompositionResult r;
  if (sc.scheduler.approx) {
    ApproxOptions o;
    o.tol = sc.scheduler.tol;
    r = decompose_approx(sc.graph, a, eps, o, {}, sc.limits);
  } else {
    r = decompose_exact(sc.graph, a, eps, sc.limits);
  }
  if (auto* f = std::get_if<DecompositionFailure>(&r)) {
    std::ostringstream os;
    os << f->message << "\n";
    os << (f->kind == DecompositionFailure::Kind::infeasible ? "certificate weights:" : "best coverage:");
    for (double v : f->evidence) os << ' ' << format_double(v);
    return Infeasible{os.str()};
  }
  return std::get<Decomposition>(std::move(r));
}

std::string stable_failure(const StablePriorityResult& r) {
  return "fixed-priority condition fails at links " + links_text(r.violations) +
         " (rates are outside the fixed-priority-achievable region)";
}

std::string delay_failure(const DelayPriorityResult& r) {
  if (!r.stuck.empty()) return "no remaining link meets its delay target; remaining links: " + links_text(r.stuck);
  return "assignment did not pass the delay region check";
}

}  // namespace

std::variant<PrioritySpec, Infeasible> resolve_policy(const Scenario& sc) {
  const auto& s = sc.scheduler;
  PolicyKind kind;
  if (s.policy)
    kind = *s.policy;
  else if (!s.priority_lines.empty())
    kind = PolicyKind::fixed;
  else if (!s.distribution.priorities.empty() || s.decomposition_path)
    kind = PolicyKind::distribution;
  else
    throw InputError(sc.source + ": [scheduler]: missing field 'policy'");

  switch (kind) {
    case PolicyKind::fixed:
      return PrioritySpec{priority_from_lines(sc)};
    case PolicyKind::distribution: {
      if (s.decomposition_path) {
        if (!s.distribution.priorities.empty())
          throw InputError("[scheduler]: give either priority_choice lines or a decomposition file, not both");
        return PrioritySpec{read_decomposition_file(sc, *s.decomposition_path).induced_distribution(sc.size())};
      }
      s.distribution.validate(sc.size());
      return PrioritySpec{s.distribution};
    }
    case PolicyKind::lqf:
      return PrioritySpec{LongestQueueFirst{}};
    case PolicyKind::maxweight:
      return PrioritySpec{MaxWeightPriority{}};
    case PolicyKind::stable: {
      auto r = stable_priority(sc.graph, sc.rates());
      if (!r.feasible) return Infeasible{stable_failure(r)};
      return PrioritySpec{r.priority};
    }
    case PolicyKind::randomized: {
      auto d = synthesize_decomposition(sc);
      if (auto* f = std::get_if<Infeasible>(&d)) return *f;
      return PrioritySpec{std::get<Decomposition>(d).induced_distribution(sc.size())};
    }
    case PolicyKind::delay: {
      auto r = delay_priority(sc.graph, need_traffic(sc), sc.delay_targets(), s.ordering);
      if (!r.feasible) return Infeasible{delay_failure(r)};
      return PrioritySpec{r.priority};
    }
  }
  throw InputError("unhandled policy");
}

int cmd_analyze(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto& g = sc.graph;
  const int n = g.size();
  if (sc.topology_warning && !opts.quiet) err << "warning: " << *sc.topology_warning << '\n';
  out << "links " << n << '\n';
  out << "conflicts " << g.edge_count() << '\n';
  out << "max_interference_degree " << max_interference_degree(g, sc.limits) << '\n';
  const auto greedy = compute_delta(g, DeltaMode::greedy, sc.limits);
  out << "delta_greedy " << greedy.value << '\n';
  if (n <= sc.limits.brute_force_cap) out << "delta_brute " << compute_delta(g, DeltaMode::brute, sc.limits).value << '\n';
  const auto floor = efficiency_floor(g, sc.limits);
  out << "delta " << floor.delta << '\n';
  out << "efficiency_floor " << format_double(floor.floor) << '\n';
  out << "removal_order " << links_text(floor.removal.order) << '\n';
  out << "floor_priority";
  for (int r : floor.priority.ranks()) out << ' ' << r;
  out << '\n';
  if (!sc.traffic) return exit_code::ok;

  const auto a = sc.rates();
  out << "rates";
  for (double v : a) out << ' ' << format_double(v);
  out << '\n';
  out << "in_a_min " << yes_no(in_a_min(g, a)) << '\n';
  out << "in_a " << yes_no(in_a_any(g, a)) << '\n';
  if (n <= sc.limits.enumeration_cap) {
    const double slack = max_uniform_slack(g, a, sc.limits);
    out << "in_a_max " << yes_no(slack > 1e-12) << '\n';
    out << "a_max_slack " << format_double(slack) << '\n';
  } else {
    out << "in_a_max skipped (more than " << sc.limits.enumeration_cap << " links)\n";
  }
  const auto sp = stable_priority(g, a);
  out << "stable_priority " << (sp.feasible ? "feasible" : "infeasible");
  for (int r : sp.priority.ranks()) out << ' ' << r;
  out << '\n';
  if (!sp.feasible) out << "stable_priority_violations " << links_text(sp.violations) << '\n';
  return exit_code::ok;
}

int cmd_synth(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.goal == "stability" || opts.goal == "delay") {
    Priority p;
    if (opts.goal == "stability") {
      need_traffic(sc);
      auto r = stable_priority(sc.graph, sc.rates());
      if (!r.feasible) {
        err << "infeasible: " << stable_failure(r) << '\n';
        return exit_code::infeasible;
      }
      p = r.priority;
    } else {
      auto r = delay_priority(sc.graph, need_traffic(sc), sc.delay_targets(), sc.scheduler.ordering);
      if (!r.feasible) {
        err << "infeasible: " << delay_failure(r) << '\n';
        return exit_code::infeasible;
      }
      p = r.priority;
    }
    const auto path = output_path(sc, opts, sc.out.priority);
    auto os = open_output(path);
    write_priority(os, p);
    finish_output(os, path);
    if (!opts.quiet) out << "wrote " << path.string() << '\n';
    return exit_code::ok;
  }
  if (opts.goal == "randomized") return cmd_decompose(sc, opts, out, err);
  throw InputError("unknown goal '" + opts.goal + "' (expected stability, delay or randomized)");
}

int cmd_decompose(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  need_traffic(sc);
  auto d = synthesize_decomposition(sc);
  if (auto* f = std::get_if<Infeasible>(&d)) {
    err << "infeasible: " << f->reason << '\n';
    return exit_code::infeasible;
  }
  const auto& dec = std::get<Decomposition>(d);
  const auto path = output_path(sc, opts, sc.out.decomposition);
  auto os = open_output(path);
  write_decomposition(os, dec, sc.size());
  finish_output(os, path);
  if (!opts.quiet) {
    out << "terms " << dec.terms.size() << '\n';
    out << "epsilon " << format_double(dec.epsilon) << '\n';
    out << "budget " << format_double(dec.budget) << '\n';
    if (dec.oracle_calls) out << "oracle_calls " << dec.oracle_calls << '\n';
    out << "wrote " << path.string() << '\n';
  }
  return exit_code::ok;
}

int cmd_simulate(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto& traffic = need_traffic(sc);
  const auto seed = need_seed(sc);
  if (!sc.sim.slots) throw InputError(sc.source + ": [sim]: missing field 'slots'");
  auto policy = resolve_policy(sc);
  if (auto* f = std::get_if<Infeasible>(&policy)) {
    err << "infeasible: " << f->reason << '\n';
    return exit_code::infeasible;
  }
  const auto& spec = std::get<PrioritySpec>(policy);
  RunConfig cfg;
  cfg.slots = *sc.sim.slots;
  cfg.seed = seed;
  cfg.thresholds = sc.sim.thresholds;
  cfg.burn_in_fraction = sc.sim.burn_in;
  cfg.limits = sc.limits;

  RunStats stats;
  if (sc.sim.replications == 1) {
    std::optional<std::ofstream> trace_os;
    fs::path trace_path;
    TraceFn trace;
    if (sc.sim.trace) {
      trace_path = output_path(sc, opts, sc.out.trace);
      trace_os.emplace(open_output(trace_path));
      write_trace_header(*trace_os);
      trace = [&](const SimState& s, const LinkSet& m) { write_trace_rows(*trace_os, s, m); };
    }
    stats = run(sc.graph, spec, traffic, cfg, trace);
    if (trace_os) {
      finish_output(*trace_os, trace_path);
      if (!opts.quiet) out << "wrote " << trace_path.string() << '\n';
    }
  } else {
    if (sc.sim.trace) throw InputError("[sim]: trace needs replications 1");
    const auto runs = run_replications(sc.graph, spec, traffic, cfg, sc.sim.replications);
    stats = merge(runs);
  }
  const auto path = output_path(sc, opts, sc.out.summary);
  auto os = open_output(path);
  write_summary_csv(os, stats);
  finish_output(os, path);
  if (!opts.quiet) out << "wrote " << path.string() << '\n';
  return exit_code::ok;
}

int cmd_delay_exponent(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto& traffic = need_traffic(sc);
  std::optional<Priority> fixed;
  const auto& s = sc.scheduler;
  if (s.policy || !s.priority_lines.empty()) {
    auto policy = resolve_policy(sc);
    if (auto* f = std::get_if<Infeasible>(&policy)) {
      err << "infeasible: " << f->reason << '\n';
      return exit_code::infeasible;
    }
    if (auto* p = std::get_if<Priority>(&std::get<PrioritySpec>(policy))) fixed = *p;
  }
  if (!fixed && !opts.quiet) err << "note: no fixed priority configured; reporting worst-case exponents\n";

  std::vector<ExponentRow> rows;
  for (int i = 0; i < sc.size(); ++i) {
    ExponentRow row;
    row.link = i;
    row.result = fixed ? fixed_priority_exponent(sc.graph, traffic, i, *fixed) : worst_case_exponent(sc.graph, traffic, i);
    if (sc.sim.empirical) {
      const auto seed = need_seed(sc);
      if (!sc.sim.slots) throw InputError(sc.source + ": [sim]: missing field 'slots'");
      if (sc.sim.thresholds.empty()) throw InputError(sc.source + ": [sim]: missing field 'thresholds'");
      OverflowEstimate est;
      const auto link_seed = derive_seed(seed, stream_purpose::replication, static_cast<std::uint64_t>(i));
      if (fixed) {
        est = estimate_overflow(sc.graph, *fixed, traffic, i, sc.sim.thresholds, *sc.sim.slots, sc.sim.replications, link_seed);
      } else {
        const auto dom = build_dominant_system(sc.graph, i, Priority::identity(sc.size()), traffic, DominantMode::all_neighbors);
        est = estimate_overflow(dom.graph, dom.priority, dom.traffic, dom.tagged, sc.sim.thresholds, *sc.sim.slots,
                                sc.sim.replications, link_seed);
      }
      row.has_empirical = true;
      row.empirical_slope = est.slope;
    }
    rows.push_back(std::move(row));
  }
  const auto path = output_path(sc, opts, sc.out.exponents);
  auto os = open_output(path);
  write_exponent_csv(os, rows);
  finish_output(os, path);
  if (!opts.quiet) out << "wrote " << path.string() << '\n';
  return exit_code::ok;
}

}  // namespace prisched
