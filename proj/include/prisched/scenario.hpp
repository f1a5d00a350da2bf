#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prisched/decomposition.hpp"
#include "prisched/delay.hpp"
#include "prisched/geometry.hpp"
#include "prisched/graph.hpp"
#include "prisched/priority.hpp"
#include "prisched/traffic.hpp"

namespace prisched {

enum class PolicyKind { fixed, distribution, lqf, maxweight, stable, randomized, delay };

struct SchedulerConfig {
  std::optional<PolicyKind> policy;
  std::vector<std::pair<int, int>> priority_lines;  // (link, rank), 0-based link
  PriorityDistribution distribution;
  std::optional<std::string> decomposition_path;
  std::optional<double> epsilon;
  double tol = 0.05;
  bool approx = false;
  std::vector<std::optional<double>> delay_targets;  // per link; unset means 0
  DelayOrdering ordering = DelayOrdering::as_printed;
};

struct SimConfig {
  std::optional<std::int64_t> slots;
  int replications = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::int64_t> thresholds;
  double burn_in = 0.1;
  bool trace = false;
  bool empirical = false;
};

struct OutConfig {
  std::string dir = ".";
  std::string summary = "summary.csv";
  std::string trace = "trace.csv";
  std::string priority = "priority.txt";
  std::string decomposition = "decomposition.txt";
  std::string exponents = "exponents.csv";
};

/// Everything a command needs, read from one flat sectioned config.
struct Scenario {
  std::string source = "<config>";
  std::string base_dir = ".";  // relative paths inside the config resolve here
  InterferenceGraph graph;
  std::optional<GeometricNetwork> network;
  std::optional<std::string> topology_warning;
  std::optional<Traffic> traffic;
  SchedulerConfig scheduler;
  SimConfig sim;
  OutConfig out;
  Limits limits;

  int size() const { return graph.size(); }
  std::vector<double> rates() const;
  std::vector<double> delay_targets() const;
};

/// Parses the config. Errors name the line and the offending field.
/// `seed_override` replaces the [sim] seed (it also seeds topology generation).
Scenario parse_scenario(std::istream& is, const std::string& source = "<config>",
                        std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace prisched
