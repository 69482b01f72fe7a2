#include "oppnet/prophet.hpp"

#include <cmath>
#include <stdexcept>

namespace oppnet {

double prophet_encounter(double p_old, double p_init) {
  if (!(p_old >= 0.0 && p_old <= 1.0)) {
    throw std::domain_error("delivery predictability outside [0, 1]");
  }
  return p_old + (1.0 - p_old) * p_init;
}

double prophet_age(double p, double units, double gamma) {
  if (units <= 0.0) return p;
  return p * std::pow(gamma, units);
}

double prophet_transitive(double p_ac, double p_ab, double p_bc, double beta) {
  return p_ac + (1.0 - p_ac) * p_ab * p_bc * beta;
}

ProphetTable::ProphetTable(NodeId self, std::size_t node_count, const ProphetParams& params)
    : self_(self), params_(params), values_(node_count, 0.0) {}

void ProphetTable::age_to(double now) {
  const double units = std::floor((now - last_aged_) / params_.aging_unit);
  if (units < 1.0) return;
  const double factor = std::pow(params_.gamma, units);
  for (auto& v : values_) v *= factor;
  last_aged_ += units * params_.aging_unit;
}

void ProphetTable::encounter(NodeId peer) {
  values_[peer] = prophet_encounter(values_[peer], params_.p_init);
}

void ProphetTable::transitive(NodeId peer, std::span<const double> peer_values) {
  const double p_ab = values_[peer];
  for (NodeId c = 0; c < values_.size(); ++c) {
    if (c == self_ || c == peer) continue;
    values_[c] = prophet_transitive(values_[c], p_ab, peer_values[c], params_.beta);
  }
}

}  // namespace oppnet
