#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prisched/graph.hpp"

namespace prisched {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct DirectedLink {
  int tx = 0;  // node index
  int rx = 0;
};

/// Nodes in the plane and directed links between nodes within transmission range.
struct GeometricNetwork {
  std::vector<Point> nodes;
  std::vector<DirectedLink> links;
  double tx_range = 1.0;

  double link_length(int link) const { return distance(nodes[links[link].tx], nodes[links[link].rx]); }
  /// Throws InputError if a link is degenerate or longer than tx_range.
  void validate() const;
};

struct NetworkParams {
  int n_nodes = 0;
  double area_side = 1.0;
  double tx_range = 1.0;
  double link_density = 1.0;  // fraction of in-range ordered pairs kept as links
  std::uint64_t seed = 0;
};

struct GeneratedNetwork {
  GeometricNetwork network;
  std::optional<std::string> warning;  // set when no link could be formed
};

/// Uniform node placement in [0, area_side)^2; each in-range ordered pair
/// becomes a link with probability link_density.
GeneratedNetwork generate_network(const NetworkParams& params);

struct PrimaryInterference {};

/// Conflict iff some endpoint of one link is closer than hops * tx_range to
/// some endpoint of the other.
struct KHopInterference {
  int hops = 1;
};

/// Conflict iff d(tx_i, rx_j) < c * l_j or d(tx_j, rx_i) < c * l_i, with
/// c = snr_threshold^(1/path_loss).
struct PhyInterference {
  double snr_threshold = 1.0;
  double path_loss = 2.0;
};

using InterferenceModel = std::variant<PrimaryInterference, KHopInterference, PhyInterference>;

InterferenceGraph build_interference(const GeometricNetwork& net, const InterferenceModel& model);

}  // namespace prisched
