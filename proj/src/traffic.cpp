#include "prisched/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace prisched {

namespace {

// log(exp(x) + exp(y)) without overflow.
double log_add(double x, double y) {
  if (x == -kInfinity) return y;
  if (y == -kInfinity) return x;
  double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

struct MarkovTerms {
  double p00, p01, p10, p11, det_coeff;
};

MarkovTerms markov_terms(const MarkovOnOffArrivals& m) {
  const double a = m.p_off_to_on, b = m.p_on_to_off;
  return {1.0 - a, a, b, 1.0 - b, 1.0 - a - b};
}

// Perron root of [[p00, p01 E], [p10, p11 E]] with E = exp(c), returned as
// (log root, root scaled by exp(-max(c, 0))).
std::pair<double, double> markov_root(const MarkovTerms& t, double c) {
  if (c > 0.0) {
    const double inv = std::exp(-c);
    const double tr = t.p00 * inv + t.p11;
    const double diff = t.p00 * inv - t.p11;
    const double disc = diff * diff + 4.0 * t.p01 * t.p10 * inv;
    const double mu = 0.5 * (tr + std::sqrt(disc));
    return {c + std::log(mu), mu};
  }
  const double e = std::exp(c);
  const double tr = t.p00 + t.p11 * e;
  const double diff = t.p00 - t.p11 * e;
  const double disc = diff * diff + 4.0 * t.p01 * t.p10 * e;
  const double lam = 0.5 * (tr + std::sqrt(disc));
  return {std::log(lam), lam};
}

constexpr double kThetaCap = 200.0;

}  // namespace

ArrivalModel::ArrivalModel(Kind kind) : kind_(std::move(kind)) {}

ArrivalModel ArrivalModel::bernoulli(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("Bernoulli probability must lie in [0, 1]");
  ArrivalModel m(BernoulliArrivals{q});
  m.bound_ = 1;
  m.rate_ = q;
  return m;
}

ArrivalModel ArrivalModel::batch(std::vector<int> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) throw InputError("batch model needs matching non-empty value/probability lists");
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 0) throw InputError("batch values must be nonnegative");
    if (!(probs[k] >= 0.0 && probs[k] <= 1.0)) throw InputError("batch probabilities must lie in [0, 1]");
    total += probs[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("batch probabilities must sum to 1");
  double rate = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) rate += values[k] * probs[k];
  int bound = *std::max_element(values.begin(), values.end());
  ArrivalModel m(BatchArrivals{std::move(values), std::move(probs)});
  m.bound_ = bound;
  m.rate_ = rate;
  return m;
}

ArrivalModel ArrivalModel::markov_onoff(double p_on_to_off, double p_off_to_on, int batch_on) {
  if (!(p_on_to_off >= 0.0 && p_on_to_off <= 1.0 && p_off_to_on >= 0.0 && p_off_to_on <= 1.0))
    throw InputError("Markov transition probabilities must lie in [0, 1]");
  if (p_on_to_off + p_off_to_on <= 0.0) throw InputError("Markov on/off chain must be able to switch state");
  if (batch_on < 0) throw InputError("Markov batch size must be nonnegative");
  ArrivalModel m(MarkovOnOffArrivals{p_on_to_off, p_off_to_on, batch_on});
  m.bound_ = batch_on;
  m.rate_ = batch_on * p_off_to_on / (p_on_to_off + p_off_to_on);
  return m;
}

ArrivalModel ArrivalModel::with_bound(int bound) const {
  if (bound < bound_) throw InputError("bound override below the model's largest batch");
  ArrivalModel m = *this;
  m.bound_ = bound;
  return m;
}

std::pair<double, double> ArrivalModel::support() const {
  if (const auto* b = std::get_if<BernoulliArrivals>(&kind_)) {
    return {b->q < 1.0 ? 0.0 : 1.0, b->q > 0.0 ? 1.0 : 0.0};
  }
  if (const auto* b = std::get_if<BatchArrivals>(&kind_)) {
    double lo = kInfinity, hi = -kInfinity;
    for (std::size_t k = 0; k < b->values.size(); ++k) {
      if (b->probs[k] <= 0.0) continue;
      lo = std::min(lo, static_cast<double>(b->values[k]));
      hi = std::max(hi, static_cast<double>(b->values[k]));
    }
    return {lo, hi};
  }
  return {0.0, static_cast<double>(std::get<MarkovOnOffArrivals>(kind_).batch_on)};
}

double ArrivalModel::log_mgf(double theta) const {
  if (theta == 0.0) return 0.0;
  if (const auto* b = std::get_if<BernoulliArrivals>(&kind_)) {
    if (b->q <= 0.0) return 0.0;
    if (b->q >= 1.0) return theta;
    return log_add(std::log1p(-b->q), std::log(b->q) + theta);
  }
  if (const auto* b = std::get_if<BatchArrivals>(&kind_)) {
    double acc = -kInfinity;
    for (std::size_t k = 0; k < b->values.size(); ++k)
      if (b->probs[k] > 0.0) acc = log_add(acc, std::log(b->probs[k]) + theta * b->values[k]);
    return acc;
  }
  const auto& m = std::get<MarkovOnOffArrivals>(kind_);
  return markov_root(markov_terms(m), theta * m.batch_on).first;
}

double ArrivalModel::log_mgf_derivative(double theta) const {
  if (const auto* b = std::get_if<BernoulliArrivals>(&kind_)) {
    if (b->q <= 0.0) return 0.0;
    if (b->q >= 1.0) return 1.0;
    // Tilted success probability q e^t / (1 - q + q e^t).
    return std::exp(std::log(b->q) + theta - log_mgf(theta));
  }
  if (const auto* b = std::get_if<BatchArrivals>(&kind_)) {
    const double norm = log_mgf(theta);
    double mean = 0.0;
    for (std::size_t k = 0; k < b->values.size(); ++k)
      if (b->probs[k] > 0.0) mean += b->values[k] * std::exp(std::log(b->probs[k]) + theta * b->values[k] - norm);
    return mean;
  }
  const auto& m = std::get<MarkovOnOffArrivals>(kind_);
  const auto t = markov_terms(m);
  const double c = theta * m.batch_on;
  // Implicit differentiation of the characteristic polynomial, in the same
  // scaling as markov_root.
  double num, den;
  if (c > 0.0) {
    const double inv = std::exp(-c);
    const double mu = markov_root(t, c).second;
    num = m.batch_on * (t.p11 * mu - t.det_coeff * inv);
    den = mu * (2.0 * mu - t.p00 * inv - t.p11);
  } else {
    const double e = std::exp(c);
    const double lam = markov_root(t, c).second;
    num = m.batch_on * e * (t.p11 * lam - t.det_coeff);
    den = lam * (2.0 * lam - t.p00 - t.p11 * e);
  }
  if (std::abs(den) > 1e-12) return num / den;
  const double h = 1e-6;
  return (log_mgf(theta + h) - log_mgf(theta - h)) / (2.0 * h);
}

double ArrivalModel::legendre(double mu) const {
  if (mu < 0.0 || mu > bound_) return kInfinity;
  if (mu == rate_) return 0.0;
  auto [lo_support, hi_support] = support();
  if (mu < lo_support || mu > hi_support) return kInfinity;

  const double sign = mu > rate_ ? 1.0 : -1.0;
  auto objective = [&](double th) { return th * mu - log_mgf(th); };
  // The maximizer solves Lambda'(theta) = mu; Lambda' is increasing.
  auto overshoot = [&](double th) { return sign * (log_mgf_derivative(th) - mu) >= 0.0; };

  double near = 0.0, far = sign;
  while (!overshoot(far)) {
    if (std::abs(far) >= kThetaCap) return objective(sign * kThetaCap);  // boundary point: limit value
    near = far;
    far *= 2.0;
  }
  for (int it = 0; it < 200 && std::abs(far - near) > 1e-13 * std::max(1.0, std::abs(far)); ++it) {
    double mid = 0.5 * (near + far);
    (overshoot(mid) ? far : near) = mid;
  }
  return std::max(0.0, objective(0.5 * (near + far)));
}

int sample_arrivals(const ArrivalModel& model, ArrivalStream& stream) {
  const auto& kind = model.kind();
  if (const auto* b = std::get_if<BernoulliArrivals>(&kind)) return stream.rng_.bernoulli(b->q) ? 1 : 0;
  if (const auto* b = std::get_if<BatchArrivals>(&kind)) {
    double u = stream.rng_.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < b->values.size(); ++k) {
      acc += b->probs[k];
      if (u < acc) return b->values[k];
    }
    return b->values.back();
  }
  const auto& m = std::get<MarkovOnOffArrivals>(kind);
  if (stream.markov_state_ < 0) {
    double on = m.p_off_to_on / (m.p_on_to_off + m.p_off_to_on);
    stream.markov_state_ = stream.rng_.bernoulli(on) ? 1 : 0;
  }
  const int emitted = stream.markov_state_ == 1 ? m.batch_on : 0;
  if (stream.markov_state_ == 1) {
    if (stream.rng_.bernoulli(m.p_on_to_off)) stream.markov_state_ = 0;
  } else {
    if (stream.rng_.bernoulli(m.p_off_to_on)) stream.markov_state_ = 1;
  }
  return emitted;
}

bool Traffic::is_independent() const {
  return std::none_of(phases.begin(), phases.end(), [](const auto& p) { return p.has_value(); });
}

std::vector<double> Traffic::rates() const {
  std::vector<double> r;
  r.reserve(models.size());
  for (const auto& m : models) r.push_back(m.rate());
  return r;
}

void Traffic::validate() const {
  if (phases.empty()) return;
  if (phases.size() != models.size()) throw InputError("shared-phase list must have one entry per link");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (!phases[i]) continue;
    if (!std::holds_alternative<BernoulliArrivals>(models[i].kind()))
      throw InputError("shared-phase coupling on link " + std::to_string(i + 1) + " requires a Bernoulli model");
    if (!(phases[i]->offset >= 0.0 && phases[i]->offset < 1.0))
      throw InputError("shared-phase offset on link " + std::to_string(i + 1) + " must lie in [0, 1)");
  }
}

TrafficSource::TrafficSource(const Traffic& traffic, std::uint64_t seed) : traffic_(traffic) {
  traffic.validate();
  const int n = traffic.size();
  streams_.reserve(n);
  for (int i = 0; i < n; ++i) streams_.emplace_back(derive_seed(seed, stream_purpose::arrivals, i));
  group_of_.assign(n, -1);
  if (!traffic.phases.empty()) {
    std::map<int, int> slot_of_group;
    for (int i = 0; i < n; ++i) {
      if (!traffic.phases[i]) continue;
      auto [it, inserted] = slot_of_group.emplace(traffic.phases[i]->group, static_cast<int>(slot_of_group.size()));
      group_of_[i] = it->second;
    }
    group_rng_.resize(slot_of_group.size());
    for (const auto& [group, slot] : slot_of_group)
      group_rng_[slot] = Rng(derive_seed(seed, stream_purpose::shared_phase, static_cast<std::uint64_t>(group)));
    group_draw_.assign(group_rng_.size(), 0.0);
  }
}

void TrafficSource::next(std::span<int> arrivals) {
  for (std::size_t g = 0; g < group_rng_.size(); ++g) group_draw_[g] = group_rng_[g].uniform();
  const auto& models = traffic_.models;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (group_of_[i] < 0) {
      arrivals[i] = sample_arrivals(models[i], streams_[i]);
      continue;
    }
    double phase = group_draw_[group_of_[i]] - traffic_.phases[i]->offset;
    if (phase < 0.0) phase += 1.0;
    arrivals[i] = phase < std::get<BernoulliArrivals>(models[i].kind()).q ? 1 : 0;
  }
}

}  // namespace prisched
