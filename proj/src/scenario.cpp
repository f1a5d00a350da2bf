#include "prisched/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "prisched/formats.hpp"

namespace prisched {

std::vector<double> Scenario::rates() const {
  if (!traffic) return std::vector<double>(size(), 0.0);
  return traffic->rates();
}

std::vector<double> Scenario::delay_targets() const {
  std::vector<double> t(size(), 0.0);
  for (int i = 0; i < size() && i < static_cast<int>(scheduler.delay_targets.size()); ++i)
    if (scheduler.delay_targets[i]) t[i] = *scheduler.delay_targets[i];
  return t;
}

namespace {

struct Line {
  int no = 0;
  std::vector<std::string> tok;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues key_values(const std::vector<std::string>& tok, std::size_t from, const std::set<std::string>& allowed) {
  KeyValues kv;
  for (std::size_t k = from; k < tok.size(); ++k) {
    const auto eq = tok[k].find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("expected key=value, got '" + tok[k] + "'");
    auto key = tok[k].substr(0, eq);
    if (!allowed.count(key)) throw InputError("unknown field '" + key + "'");
    if (!kv.emplace(key, tok[k].substr(eq + 1)).second) throw InputError("field '" + key + "' given twice");
  }
  return kv;
}

const std::string& require(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw InputError("missing field '" + key + "'");
  return it->second;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void expect_arity(const Line& l, std::size_t n) {
  if (l.tok.size() != n)
    throw InputError("'" + l.tok[0] + "' expects " + std::to_string(n - 1) + " field(s), got " + std::to_string(l.tok.size() - 1));
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "yes" || s == "true" || s == "1") return true;
  if (s == "no" || s == "false" || s == "0") return false;
  throw InputError("bad boolean for " + what + ": '" + s + "'");
}

int link_index(const std::string& text, int n) {
  const auto v = parse_int(text, "link");
  if (v < 1 || v > n) throw InputError("link " + text + " is outside 1.." + std::to_string(n));
  return static_cast<int>(v) - 1;
}

InterferenceModel parse_interference(const Line& l) {
  if (l.tok.size() < 2) throw InputError("missing field 'interference' model name");
  const auto& kind = l.tok[1];
  if (kind == "primary") {
    key_values(l.tok, 2, {});
    return PrimaryInterference{};
  }
  if (kind == "khop") {
    auto kv = key_values(l.tok, 2, {"hops"});
    const auto hops = parse_int(require(kv, "hops"), "hops");
    if (hops < 1) throw InputError("hops must be at least 1");
    return KHopInterference{static_cast<int>(hops)};
  }
  if (kind == "phy") {
    auto kv = key_values(l.tok, 2, {"snr", "pathloss"});
    return PhyInterference{parse_double(require(kv, "snr"), "snr"), parse_double(require(kv, "pathloss"), "pathloss")};
  }
  throw InputError("unknown interference model '" + kind + "'");
}

void parse_topology(const std::vector<Line>& lines, Scenario& sc, std::optional<std::uint64_t> master_seed) {
  std::ostringstream net_text;
  std::vector<const Line*> graph_lines;
  bool has_net = false;
  std::optional<Line> generate, interference, range;
  for (const auto& l : lines) {
    const auto& k = l.tok[0];
    if (k == "links" || k == "edge") {
      graph_lines.push_back(&l);
    } else if (k == "node" || k == "link") {
      has_net = true;
      for (const auto& t : l.tok) net_text << t << ' ';
      net_text << '\n';
    } else if (k == "generate") {
      if (generate) throw ParseError(l.no, "duplicate 'generate' line");
      generate = l;
    } else if (k == "interference") {
      if (interference) throw ParseError(l.no, "duplicate 'interference' line");
      interference = l;
    } else if (k == "range") {
      range = l;
    } else {
      throw ParseError(l.no, "unknown topology field '" + k + "'");
    }
  }
  const bool has_graph = !graph_lines.empty();
  const int kinds = has_graph + has_net + generate.has_value();
  if (kinds == 0) throw InputError("[topology]: missing field 'links' (or node/link lines, or 'generate')");
  if (kinds > 1) throw InputError("[topology]: give exactly one of an edge list, a node/link network, or 'generate'");

  if (has_graph) {
    if (interference) throw ParseError(interference->no, "'interference' applies only to geometric topologies");
    std::optional<InterferenceGraph> g;
    for (const Line* l : graph_lines) {
      try {
        if (l->tok[0] == "links") {
          expect_arity(*l, 2);
          if (g) throw InputError("duplicate 'links' line");
          const auto n = parse_int(l->tok[1], "links");
          if (n < 0) throw InputError("links must be nonnegative");
          g.emplace(static_cast<int>(n));
        } else {
          expect_arity(*l, 3);
          if (!g) throw InputError("'edge' before 'links'");
          const int i = link_index(l->tok[1], g->size());
          const int j = link_index(l->tok[2], g->size());
          if (!g->add_conflict(i, j)) throw InputError("duplicate edge " + l->tok[1] + " " + l->tok[2]);
        }
      } catch (const InputError& e) {
        throw ParseError(l->no, e.what());
      }
    }
    if (!g) throw InputError("[topology]: missing field 'links'");
    sc.graph = std::move(*g);
    return;
  }
  if (!interference) throw InputError("[topology]: missing field 'interference'");
  InterferenceModel model;
  try {
    model = parse_interference(*interference);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(interference->no, e.what());
  }
  if (has_net) {
    if (!range) throw InputError("[topology]: missing field 'range'");
    double r = 0.0;
    try {
      if (range->tok.size() != 2) throw InputError("'range' expects 1 field");
      r = parse_double(range->tok[1], "range");
    } catch (const InputError& e) {
      throw ParseError(range->no, e.what());
    }
    std::istringstream is(net_text.str());
    try {
      sc.network = parse_network(is, r);
    } catch (const InputError& e) {
      throw InputError(std::string("[topology]: ") + e.what());
    }
  } else {
    try {
      auto kv = key_values(generate->tok, 1, {"nodes", "side", "range", "density", "seed"});
      NetworkParams p;
      p.n_nodes = static_cast<int>(parse_int(require(kv, "nodes"), "nodes"));
      p.area_side = parse_double(require(kv, "side"), "side");
      p.tx_range = parse_double(require(kv, "range"), "range");
      p.link_density = kv.count("density") ? parse_double(kv.at("density"), "density") : 1.0;
      if (kv.count("seed"))
        p.seed = static_cast<std::uint64_t>(parse_int(kv.at("seed"), "seed"));
      else if (master_seed)
        p.seed = derive_seed(*master_seed, stream_purpose::geometry);
      else
        throw InputError("'generate' needs seed=<int> or a [sim] seed");
      auto gen = generate_network(p);
      sc.network = std::move(gen.network);
      sc.topology_warning = std::move(gen.warning);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(generate->no, e.what());
    }
  }
  sc.graph = build_interference(*sc.network, model);
}

ArrivalModel parse_arrival(const KeyValues& kv) {
  const auto& kind = require(kv, "kind");
  ArrivalModel m = ArrivalModel::zero();
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (kv.count(k)) throw InputError("field '" + std::string(k) + "' does not apply to kind=" + kind);
  };
  if (kind == "bernoulli") {
    forbid({"values", "probs", "on_off", "off_on", "batch"});
    m = ArrivalModel::bernoulli(parse_double(require(kv, "q"), "q"));
  } else if (kind == "batch") {
    forbid({"q", "on_off", "off_on", "batch"});
    std::vector<int> values;
    std::vector<double> probs;
    for (const auto& v : split_commas(require(kv, "values"))) values.push_back(static_cast<int>(parse_int(v, "values")));
    for (const auto& v : split_commas(require(kv, "probs"))) probs.push_back(parse_double(v, "probs"));
    m = ArrivalModel::batch(std::move(values), std::move(probs));
  } else if (kind == "markov") {
    forbid({"q", "values", "probs"});
    const int batch = kv.count("batch") ? static_cast<int>(parse_int(kv.at("batch"), "batch")) : 1;
    m = ArrivalModel::markov_onoff(parse_double(require(kv, "on_off"), "on_off"),
                                   parse_double(require(kv, "off_on"), "off_on"), batch);
  } else if (kind == "zero") {
    forbid({"q", "values", "probs", "on_off", "off_on", "batch"});
  } else {
    throw InputError("unknown arrival kind '" + kind + "'");
  }
  if (kv.count("bound")) m = m.with_bound(static_cast<int>(parse_int(kv.at("bound"), "bound")));
  return m;
}

void parse_traffic(const std::vector<Line>& lines, Scenario& sc) {
  const int n = sc.size();
  const std::set<std::string> allowed{"kind", "q", "values", "probs", "on_off", "off_on", "batch", "bound", "group", "offset"};
  std::vector<std::optional<ArrivalModel>> models(n);
  std::vector<std::optional<SharedPhase>> phases(n);
  std::optional<ArrivalModel> fallback;
  std::optional<SharedPhase> fallback_phase;
  bool any_phase = false;
  for (const auto& l : lines) {
    try {
      if (l.tok[0] != "link" && l.tok[0] != "all") throw InputError("unknown traffic field '" + l.tok[0] + "'");
      const bool all = l.tok[0] == "all";
      if (!all && l.tok.size() < 2) throw InputError("'link' needs a link index");
      const int i = all ? -1 : link_index(l.tok[1], n);
      auto kv = key_values(l.tok, all ? 1 : 2, allowed);
      auto model = parse_arrival(kv);
      std::optional<SharedPhase> phase;
      if (kv.count("group") || kv.count("offset")) {
        phase = SharedPhase{static_cast<int>(parse_int(require(kv, "group"), "group")),
                            kv.count("offset") ? parse_double(kv.at("offset"), "offset") : 0.0};
        any_phase = true;
      }
      if (all) {
        if (fallback) throw InputError("duplicate 'all' line");
        fallback = model;
        fallback_phase = phase;
      } else {
        if (models[i]) throw InputError("traffic for link " + l.tok[1] + " given twice");
        models[i] = model;
        phases[i] = phase;
      }
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(l.no, e.what());
    }
  }
  Traffic t;
  for (int i = 0; i < n; ++i) {
    if (!models[i] && !fallback)
      throw InputError("[traffic]: link " + std::to_string(i + 1) + " has no arrival model (add 'link " +
                       std::to_string(i + 1) + " kind=...' or an 'all kind=...' line)");
    t.models.push_back(models[i] ? *models[i] : *fallback);
  }
  if (any_phase) {
    for (int i = 0; i < n; ++i) t.phases.push_back(models[i] ? phases[i] : fallback_phase);
  }
  try {
    t.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("[traffic]: ") + e.what());
  }
  sc.traffic = std::move(t);
}

PolicyKind parse_policy(const std::string& s) {
  static const std::map<std::string, PolicyKind> names{
      {"fixed", PolicyKind::fixed},   {"distribution", PolicyKind::distribution}, {"lqf", PolicyKind::lqf},
      {"maxweight", PolicyKind::maxweight}, {"stable", PolicyKind::stable},      {"randomized", PolicyKind::randomized},
      {"delay", PolicyKind::delay}};
  auto it = names.find(s);
  if (it == names.end()) throw InputError("unknown policy '" + s + "'");
  return it->second;
}

void parse_scheduler(const std::vector<Line>& lines, Scenario& sc) {
  const int n = sc.size();
  auto& cfg = sc.scheduler;
  cfg.delay_targets.assign(n, std::nullopt);
  for (const auto& l : lines) {
    try {
      const auto& k = l.tok[0];
      if (k == "policy") {
        expect_arity(l, 2);
        cfg.policy = parse_policy(l.tok[1]);
      } else if (k == "priority") {
        expect_arity(l, 3);
        cfg.priority_lines.emplace_back(link_index(l.tok[1], n), static_cast<int>(parse_int(l.tok[2], "rank")));
      } else if (k == "priority_choice") {
        if (l.tok.size() != static_cast<std::size_t>(n) + 2)
          throw InputError("'priority_choice' expects a probability and " + std::to_string(n) + " ranks");
        std::vector<int> ranks;
        for (int i = 0; i < n; ++i) ranks.push_back(static_cast<int>(parse_int(l.tok[i + 2], "rank")));
        cfg.distribution.probabilities.push_back(parse_double(l.tok[1], "probability"));
        cfg.distribution.priorities.emplace_back(std::move(ranks));
      } else if (k == "decomposition") {
        expect_arity(l, 2);
        cfg.decomposition_path = l.tok[1];
      } else if (k == "epsilon") {
        expect_arity(l, 2);
        cfg.epsilon = parse_double(l.tok[1], "epsilon");
        if (!(*cfg.epsilon >= 0.0)) throw InputError("epsilon must be nonnegative");
      } else if (k == "tol") {
        expect_arity(l, 2);
        cfg.tol = parse_double(l.tok[1], "tol");
        if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw InputError("tol must lie in (0, 1)");
      } else if (k == "approx") {
        expect_arity(l, 2);
        cfg.approx = parse_bool(l.tok[1], "approx");
      } else if (k == "delay_target") {
        expect_arity(l, 3);
        const double v = parse_double(l.tok[2], "delay_target");
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("delay targets must be finite and nonnegative");
        cfg.delay_targets[link_index(l.tok[1], n)] = v;
      } else if (k == "delay_qos") {
        expect_arity(l, 4);
        cfg.delay_targets[link_index(l.tok[1], n)] =
            qos_to_exponent(parse_double(l.tok[2], "buffer"), parse_double(l.tok[3], "eps"));
      } else if (k == "ordering") {
        expect_arity(l, 2);
        if (l.tok[1] == "printed")
          cfg.ordering = DelayOrdering::as_printed;
        else if (l.tok[1] == "zero_first")
          cfg.ordering = DelayOrdering::zero_targets_first;
        else
          throw InputError("ordering must be 'printed' or 'zero_first'");
      } else {
        throw InputError("unknown scheduler field '" + k + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(l.no, e.what());
    }
  }
}

void parse_sim(const std::vector<Line>& lines, Scenario& sc) {
  auto& s = sc.sim;
  for (const auto& l : lines) {
    try {
      const auto& k = l.tok[0];
      if (k == "slots") {
        expect_arity(l, 2);
        s.slots = parse_int(l.tok[1], "slots");
        if (*s.slots < 1) throw InputError("slots must be at least 1");
      } else if (k == "replications") {
        expect_arity(l, 2);
        s.replications = static_cast<int>(parse_int(l.tok[1], "replications"));
        if (s.replications < 1) throw InputError("replications must be at least 1");
      } else if (k == "seed") {
        expect_arity(l, 2);
        s.seed = static_cast<std::uint64_t>(parse_int(l.tok[1], "seed"));
      } else if (k == "thresholds") {
        s.thresholds.clear();
        for (std::size_t t = 1; t < l.tok.size(); ++t) s.thresholds.push_back(parse_int(l.tok[t], "thresholds"));
        if (!std::is_sorted(s.thresholds.begin(), s.thresholds.end())) throw InputError("thresholds must be increasing");
      } else if (k == "burn_in") {
        expect_arity(l, 2);
        s.burn_in = parse_double(l.tok[1], "burn_in");
        if (!(s.burn_in >= 0.0 && s.burn_in < 1.0)) throw InputError("burn_in must lie in [0, 1)");
      } else if (k == "trace") {
        expect_arity(l, 2);
        s.trace = parse_bool(l.tok[1], "trace");
      } else if (k == "empirical") {
        expect_arity(l, 2);
        s.empirical = parse_bool(l.tok[1], "empirical");
      } else {
        throw InputError("unknown sim field '" + k + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(l.no, e.what());
    }
  }
}

void parse_out(const std::vector<Line>& lines, Scenario& sc) {
  std::map<std::string, std::string*> fields{{"dir", &sc.out.dir},
                                             {"summary", &sc.out.summary},
                                             {"trace", &sc.out.trace},
                                             {"priority", &sc.out.priority},
                                             {"decomposition", &sc.out.decomposition},
                                             {"exponents", &sc.out.exponents}};
  for (const auto& l : lines) {
    auto it = fields.find(l.tok[0]);
    if (it == fields.end()) throw ParseError(l.no, "unknown out field '" + l.tok[0] + "'");
    if (l.tok.size() != 2) throw ParseError(l.no, "'" + l.tok[0] + "' expects 1 field(s)");
    *it->second = l.tok[1];
  }
}

}  // namespace

Scenario parse_scenario(std::istream& is, const std::string& source, std::optional<std::uint64_t> seed_override) {
  static const std::set<std::string> section_names{"topology", "traffic", "scheduler", "sim", "out"};
  std::map<std::string, std::vector<Line>> sections;
  std::set<std::string> seen;
  std::string current;
  std::string raw;
  int no = 0;
  while (std::getline(is, raw)) {
    ++no;
    auto tok = tokenize(raw);
    if (tok.empty()) continue;
    if (tok[0].front() == '[') {
      if (tok.size() != 1 || tok[0].back() != ']') throw ParseError(no, "malformed section header");
      current = tok[0].substr(1, tok[0].size() - 2);
      if (!section_names.count(current)) throw ParseError(no, "unknown section [" + current + "]");
      if (!seen.insert(current).second) throw ParseError(no, "duplicate section [" + current + "]");
      continue;
    }
    if (current.empty()) throw ParseError(no, "content before the first section header");
    sections[current].push_back(Line{no, std::move(tok)});
  }
  if (!seen.count("topology")) throw InputError("missing section [topology]");

  Scenario sc;
  sc.source = source;
  parse_sim(sections["sim"], sc);
  if (seed_override) sc.sim.seed = seed_override;
  parse_topology(sections["topology"], sc, sc.sim.seed);
  if (seen.count("traffic")) parse_traffic(sections["traffic"], sc);
  parse_scheduler(sections["scheduler"], sc);
  parse_out(sections["out"], sc);
  return sc;
}

Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  try {
    auto sc = parse_scenario(in, path, seed_override);
    sc.base_dir = std::filesystem::path(path).parent_path().string();
    if (sc.base_dir.empty()) sc.base_dir = ".";
    return sc;
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace prisched
