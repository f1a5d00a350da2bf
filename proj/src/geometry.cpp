#include "prisched/geometry.hpp"

#include <cmath>

#include "prisched/rng.hpp"

namespace prisched {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void GeometricNetwork::validate() const {
  const int n = static_cast<int>(nodes.size());
  for (std::size_t k = 0; k < links.size(); ++k) {
    const auto& l = links[k];
    if (l.tx < 0 || l.tx >= n || l.rx < 0 || l.rx >= n)
      throw InputError("link " + std::to_string(k + 1) + " references an unknown node");
    if (l.tx == l.rx) throw InputError("link " + std::to_string(k + 1) + " has identical endpoints");
    if (distance(nodes[l.tx], nodes[l.rx]) > tx_range)
      throw InputError("link " + std::to_string(k + 1) + " is longer than the transmission range");
  }
}

GeneratedNetwork generate_network(const NetworkParams& params) {
  if (params.n_nodes <= 0) throw InputError("n_nodes must be positive");
  if (!(params.tx_range > 0.0)) throw InputError("tx_range must be positive");
  if (!(params.area_side > 0.0)) throw InputError("area_side must be positive");
  if (!(params.link_density > 0.0 && params.link_density <= 1.0)) throw InputError("link_density must be in (0, 1]");

  Rng rng(derive_seed(params.seed, stream_purpose::geometry));
  GeneratedNetwork out;
  auto& net = out.network;
  net.tx_range = params.tx_range;
  for (int v = 0; v < params.n_nodes; ++v) {
    double x = rng.uniform() * params.area_side;
    double y = rng.uniform() * params.area_side;
    net.nodes.push_back({x, y});
  }
  for (int u = 0; u < params.n_nodes; ++u) {
    for (int v = 0; v < params.n_nodes; ++v) {
      if (u == v || distance(net.nodes[u], net.nodes[v]) > params.tx_range) continue;
      // One draw per in-range pair keeps the link set a pure function of the seed.
      if (rng.uniform() < params.link_density) net.links.push_back({u, v});
    }
  }
  if (net.links.empty()) out.warning = "no feasible links: every node pair is out of range or was not sampled";
  return out;
}

namespace {

bool khop_conflict(const GeometricNetwork& net, const DirectedLink& a, const DirectedLink& b, double threshold) {
  const int ends_a[2] = {a.tx, a.rx};
  const int ends_b[2] = {b.tx, b.rx};
  for (int u : ends_a)
    for (int v : ends_b)
      if (distance(net.nodes[u], net.nodes[v]) < threshold) return true;
  return false;
}

}  // namespace

InterferenceGraph build_interference(const GeometricNetwork& net, const InterferenceModel& model) {
  net.validate();
  const int n = static_cast<int>(net.links.size());
  InterferenceGraph g(n);

  if (const auto* khop = std::get_if<KHopInterference>(&model)) {
    if (khop->hops < 1) throw InputError("K-hop model needs K >= 1");
  }
  double c = 0.0;
  if (const auto* phy = std::get_if<PhyInterference>(&model)) {
    if (!(phy->snr_threshold > 0.0) || !(phy->path_loss > 0.0))
      throw InputError("PHY-graph model needs SNR threshold > 0 and path loss exponent > 0");
    c = std::pow(phy->snr_threshold, 1.0 / phy->path_loss);
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& a = net.links[i];
      const auto& b = net.links[j];
      bool conflict = false;
      if (std::holds_alternative<PrimaryInterference>(model)) {
        conflict = a.tx == b.tx || a.tx == b.rx || a.rx == b.tx || a.rx == b.rx;
      } else if (const auto* khop = std::get_if<KHopInterference>(&model)) {
        conflict = khop_conflict(net, a, b, khop->hops * net.tx_range);
      } else {
        conflict = distance(net.nodes[a.tx], net.nodes[b.rx]) < c * net.link_length(j) ||
                   distance(net.nodes[b.tx], net.nodes[a.rx]) < c * net.link_length(i);
      }
      if (conflict) g.add_conflict(i, j);
    }
  }
  return g;
}

}  // namespace prisched
