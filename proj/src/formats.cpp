#include "prisched/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

namespace prisched {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
  if (text == "inf") return kInfinity;
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw InputError("bad number for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw InputError("bad integer for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

namespace {

// Calls fn(tokens, line_number) for each non-blank line, rewrapping errors with the line.
template <class Fn>
void for_each_line(std::istream& is, Fn&& fn) {
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    try {
      fn(tok, no);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(no, e.what());
    }
  }
}

void expect_arity(const std::vector<std::string>& tok, std::size_t n) {
  if (tok.size() != n)
    throw InputError("'" + tok[0] + "' expects " + std::to_string(n - 1) + " field(s), got " + std::to_string(tok.size() - 1));
}

int parse_index(const std::string& text, int n, std::string_view what) {
  const auto v = parse_int(text, what);
  if (v < 1 || v > n) throw InputError(std::string(what) + " " + text + " is outside 1.." + std::to_string(n));
  return static_cast<int>(v) - 1;
}

}  // namespace

void write_graph(std::ostream& os, const InterferenceGraph& g) {
  os << "links " << g.size() << '\n';
  for (auto [i, j] : g.edges()) os << "edge " << i + 1 << ' ' << j + 1 << '\n';
}

InterferenceGraph parse_graph(std::istream& is) {
  std::optional<InterferenceGraph> g;
  for_each_line(is, [&](const std::vector<std::string>& tok, int) {
    if (tok[0] == "links") {
      expect_arity(tok, 2);
      if (g) throw InputError("duplicate 'links' line");
      const auto n = parse_int(tok[1], "links");
      if (n < 0) throw InputError("links must be nonnegative");
      g.emplace(static_cast<int>(n));
    } else if (tok[0] == "edge") {
      expect_arity(tok, 3);
      if (!g) throw InputError("'edge' before 'links'");
      const int i = parse_index(tok[1], g->size(), "link");
      const int j = parse_index(tok[2], g->size(), "link");
      if (!g->add_conflict(i, j)) throw InputError("duplicate edge " + tok[1] + " " + tok[2]);
    } else {
      throw InputError("unknown keyword '" + tok[0] + "'");
    }
  });
  if (!g) throw InputError("missing field 'links'");
  return *g;
}

void write_network(std::ostream& os, const GeometricNetwork& net) {
  for (std::size_t k = 0; k < net.nodes.size(); ++k)
    os << "node " << k + 1 << ' ' << format_double(net.nodes[k].x) << ' ' << format_double(net.nodes[k].y) << '\n';
  for (std::size_t k = 0; k < net.links.size(); ++k)
    os << "link " << k + 1 << ' ' << net.links[k].tx + 1 << ' ' << net.links[k].rx + 1 << '\n';
}

GeometricNetwork parse_network(std::istream& is, double tx_range) {
  GeometricNetwork net;
  net.tx_range = tx_range;
  std::map<std::int64_t, Point> nodes;
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> links;
  for_each_line(is, [&](const std::vector<std::string>& tok, int) {
    if (tok[0] == "node") {
      expect_arity(tok, 4);
      const auto id = parse_int(tok[1], "node id");
      if (!nodes.emplace(id, Point{parse_double(tok[2], "x"), parse_double(tok[3], "y")}).second)
        throw InputError("duplicate node " + tok[1]);
    } else if (tok[0] == "link") {
      expect_arity(tok, 4);
      const auto id = parse_int(tok[1], "link id");
      if (!links.emplace(id, std::pair{parse_int(tok[2], "tx node"), parse_int(tok[3], "rx node")}).second)
        throw InputError("duplicate link " + tok[1]);
    } else {
      throw InputError("unknown keyword '" + tok[0] + "'");
    }
  });
  std::int64_t expect = 1;
  for (const auto& [id, p] : nodes) {
    if (id != expect++) throw InputError("node ids must be 1..n without gaps");
    net.nodes.push_back(p);
  }
  expect = 1;
  for (const auto& [id, ends] : links) {
    if (id != expect++) throw InputError("link ids must be 1..m without gaps");
    auto node_index = [&](std::int64_t v) {
      if (v < 1 || v > static_cast<std::int64_t>(net.nodes.size())) throw InputError("link endpoint refers to an unknown node");
      return static_cast<int>(v) - 1;
    };
    net.links.push_back({node_index(ends.first), node_index(ends.second)});
  }
  net.validate();
  return net;
}

void write_priority(std::ostream& os, const Priority& p) {
  for (int i = 0; i < p.size(); ++i) os << "priority " << i + 1 << ' ' << p.rank(i) << '\n';
}

Priority parse_priority(std::istream& is) {
  std::map<std::int64_t, int> ranks;
  for_each_line(is, [&](const std::vector<std::string>& tok, int) {
    if (tok[0] != "priority") throw InputError("unknown keyword '" + tok[0] + "'");
    expect_arity(tok, 3);
    const auto link = parse_int(tok[1], "link");
    if (!ranks.emplace(link, static_cast<int>(parse_int(tok[2], "rank"))).second) throw InputError("duplicate link " + tok[1]);
  });
  std::vector<int> r;
  std::int64_t expect = 1;
  for (const auto& [link, rank] : ranks) {
    if (link != expect++) throw InputError("priority file must list links 1..n");
    r.push_back(rank);
  }
  return Priority(std::move(r));
}

void write_decomposition(std::ostream& os, const Decomposition& d, int n) {
  os << "epsilon " << format_double(d.epsilon) << '\n';
  os << "target_scale " << format_double(d.target_scale) << '\n';
  for (int i = 0; i < n && i < static_cast<int>(d.residuals.size()); ++i)
    os << "residual " << i + 1 << ' ' << format_double(d.residuals[i]) << '\n';
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    os << "set " << k + 1 << " weight " << format_double(d.terms[k].weight) << " members";
    for (int i : d.terms[k].set) os << ' ' << i + 1;
    os << '\n';
  }
}

Decomposition parse_decomposition(std::istream& is, int n) {
  Decomposition d;
  d.residuals.assign(n, 0.0);
  for_each_line(is, [&](const std::vector<std::string>& tok, int) {
    if (tok[0] == "epsilon") {
      expect_arity(tok, 2);
      d.epsilon = parse_double(tok[1], "epsilon");
    } else if (tok[0] == "target_scale") {
      expect_arity(tok, 2);
      d.target_scale = parse_double(tok[1], "target_scale");
    } else if (tok[0] == "residual") {
      expect_arity(tok, 3);
      d.residuals[parse_index(tok[1], n, "link")] = parse_double(tok[2], "residual");
    } else if (tok[0] == "set") {
      if (tok.size() < 5 || tok[2] != "weight" || tok[4] != "members")
        throw InputError("expected 'set <k> weight <w> members <links...>'");
      const auto k = parse_int(tok[1], "set index");
      if (k != static_cast<std::int64_t>(d.terms.size()) + 1) throw InputError("set indices must run 1, 2, ...");
      DecompositionTerm t;
      t.weight = parse_double(tok[3], "weight");
      if (!(t.weight >= 0.0)) throw InputError("set weights must be nonnegative");
      for (std::size_t m = 5; m < tok.size(); ++m) t.set.push_back(parse_index(tok[m], n, "member"));
      std::sort(t.set.begin(), t.set.end());
      if (std::adjacent_find(t.set.begin(), t.set.end()) != t.set.end()) throw InputError("repeated member in set");
      d.terms.push_back(std::move(t));
    } else {
      throw InputError("unknown keyword '" + tok[0] + "'");
    }
  });
  if (d.terms.empty()) throw InputError("decomposition has no 'set' lines");
  d.coverage.assign(n, 0.0);
  d.budget = 0.0;
  for (const auto& t : d.terms) {
    d.budget += t.weight;
    for (int i : t.set) d.coverage[i] += t.weight;
  }
  return d;
}

void write_summary_csv(std::ostream& os, const RunStats& stats) {
  os << "link,rate_in,rate_out,mean_q,max_q,drift";
  for (auto b : stats.thresholds) os << ",ovf_B" << b;
  os << '\n';
  for (std::size_t i = 0; i < stats.links.size(); ++i) {
    const auto& l = stats.links[i];
    os << i + 1 << ',' << format_double(l.rate_in) << ',' << format_double(l.rate_out) << ','
       << format_double(l.mean_q) << ',' << l.max_q << ',' << format_double(l.drift);
    for (std::size_t b = 0; b < stats.thresholds.size(); ++b)
      os << ',' << format_double(stats.overflow_frequency(static_cast<int>(i), b));
    os << '\n';
  }
}

void write_trace_header(std::ostream& os) { os << "slot,link,queue,scheduled\n"; }

void write_trace_rows(std::ostream& os, const SimState& state, const LinkSet& scheduled) {
  for (int i = 0; i < state.size(); ++i) {
    const bool on = std::binary_search(scheduled.begin(), scheduled.end(), i);
    os << state.slot << ',' << i + 1 << ',' << state.queues[i] << ',' << (on ? 1 : 0) << '\n';
  }
}

void write_exponent_csv(std::ostream& os, const std::vector<ExponentRow>& rows) {
  os << "link,competing_set,exponent,residual,empirical_slope,relative_gap\n";
  for (const auto& r : rows) {
    os << r.link + 1 << ',';
    for (std::size_t k = 0; k < r.result.competing_set.size(); ++k)
      os << (k ? " " : "") << r.result.competing_set[k] + 1;
    os << ',';
    switch (r.result.status) {
      case ExponentStatus::finite:
        os << format_double(r.result.value);
        break;
      case ExponentStatus::infinite:
        os << "inf";
        break;
      case ExponentStatus::unstable:
        os << "unstable";
        break;
    }
    os << ',' << format_double(r.result.residual) << ',';
    if (r.has_empirical) {
      os << format_double(r.empirical_slope) << ',';
      if (r.result.status == ExponentStatus::finite && std::isfinite(r.empirical_slope))
        os << format_double(std::abs(r.empirical_slope - r.result.value) / r.result.value);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

}  // namespace prisched
