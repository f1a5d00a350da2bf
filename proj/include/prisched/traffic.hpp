#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "prisched/errors.hpp"
#include "prisched/rng.hpp"

namespace prisched {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BernoulliArrivals {
  double q = 0.0;
};

struct BatchArrivals {
  std::vector<int> values;
  std::vector<double> probs;
};

/// Two-state chain: emits batch_on packets in every ON slot, then transitions.
struct MarkovOnOffArrivals {
  double p_on_to_off = 0.5;
  double p_off_to_on = 0.5;
  int batch_on = 1;
};

/// Per-link arrival process with a per-slot bound and a computable log-MGF.
class ArrivalModel {
 public:
  using Kind = std::variant<BernoulliArrivals, BatchArrivals, MarkovOnOffArrivals>;

  static ArrivalModel bernoulli(double q);
  static ArrivalModel batch(std::vector<int> values, std::vector<double> probs);
  static ArrivalModel markov_onoff(double p_on_to_off, double p_off_to_on, int batch_on);
  static ArrivalModel zero() { return bernoulli(0.0); }

  /// Raises the declared per-slot bound; must not be below the largest possible batch.
  ArrivalModel with_bound(int bound) const;

  const Kind& kind() const { return kind_; }
  int bound() const { return bound_; }
  double rate() const { return rate_; }
  /// Smallest and largest long-run per-slot averages the model can sustain.
  std::pair<double, double> support() const;

  /// Lambda(theta) = lim (1/n) log E exp(theta A(n)).
  double log_mgf(double theta) const;
  double log_mgf_derivative(double theta) const;
  /// sup_theta (theta mu - Lambda(theta)); +inf outside [0, bound] or the support.
  double legendre(double mu) const;

  bool operator==(const ArrivalModel&) const = default;

 private:
  explicit ArrivalModel(Kind kind);
  Kind kind_;
  int bound_ = 0;
  double rate_ = 0.0;
};

/// Single-owner random stream for one link.
class ArrivalStream {
 public:
  explicit ArrivalStream(std::uint64_t seed = 0) : rng_(seed) {}

 private:
  friend int sample_arrivals(const ArrivalModel& model, ArrivalStream& stream);
  Rng rng_;
  int markov_state_ = -1;  // -1 until first draw, then 0 = OFF, 1 = ON
};

int sample_arrivals(const ArrivalModel& model, ArrivalStream& stream);

/// Links in the same group share one uniform draw per slot: a member fires iff
/// (U - offset) mod 1 < q. Equal offsets give aligned arrivals; offsets that
/// tile [0, 1) give staggered, nearly disjoint ones. Bernoulli members only.
struct SharedPhase {
  int group = 0;
  double offset = 0.0;
};

/// Arrival models for all links, plus optional shared-phase coupling.
struct Traffic {
  std::vector<ArrivalModel> models;
  std::vector<std::optional<SharedPhase>> phases;  // empty or one entry per link

  static Traffic independent(std::vector<ArrivalModel> models) { return Traffic{std::move(models), {}}; }
  int size() const { return static_cast<int>(models.size()); }
  bool is_independent() const;
  std::vector<double> rates() const;
  void validate() const;
};

/// Produces per-slot arrival vectors; streams derived from one master seed.
class TrafficSource {
 public:
  TrafficSource(const Traffic& traffic, std::uint64_t seed);
  void next(std::span<int> arrivals);

 private:
  Traffic traffic_;
  std::vector<ArrivalStream> streams_;
  std::vector<int> group_of_;
  std::vector<Rng> group_rng_;
  std::vector<double> group_draw_;
};

}  // namespace prisched
