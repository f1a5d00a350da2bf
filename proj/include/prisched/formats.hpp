#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "prisched/decomposition.hpp"
#include "prisched/delay.hpp"
#include "prisched/engine.hpp"
#include "prisched/geometry.hpp"
#include "prisched/graph.hpp"
#include "prisched/priority.hpp"

namespace prisched {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

/// Whitespace tokens of a line with any `#` comment removed.
std::vector<std::string> tokenize(std::string_view line);

/// Error carrying a 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& msg) : InputError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Graph: `links <n>` then `edge <i> <j>` lines, 1-based.
void write_graph(std::ostream& os, const InterferenceGraph& g);
InterferenceGraph parse_graph(std::istream& is);

// Network: `node <id> <x> <y>` then `link <id> <tx> <rx>`, 1-based ids.
void write_network(std::ostream& os, const GeometricNetwork& net);
GeometricNetwork parse_network(std::istream& is, double tx_range);

// Priority: `priority <link> <rank>` per link.
void write_priority(std::ostream& os, const Priority& p);
Priority parse_priority(std::istream& is);

// Decomposition: `epsilon`, `target_scale`, `residual <link> <v>` header lines,
// then `set <k> weight <w> members <i...>`.
void write_decomposition(std::ostream& os, const Decomposition& d, int n);
Decomposition parse_decomposition(std::istream& is, int n);

// CSV reports.
void write_summary_csv(std::ostream& os, const RunStats& stats);
void write_trace_header(std::ostream& os);
void write_trace_rows(std::ostream& os, const SimState& state, const LinkSet& scheduled);

struct ExponentRow {
  int link = 0;
  ExponentResult result;
  double empirical_slope = kInfinity;
  bool has_empirical = false;
};
void write_exponent_csv(std::ostream& os, const std::vector<ExponentRow>& rows);

}  // namespace prisched
