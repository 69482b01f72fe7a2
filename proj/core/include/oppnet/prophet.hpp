#pragma once

#include <span>
#include <vector>

#include "oppnet/scenario.hpp"
#include "oppnet/types.hpp"

namespace oppnet {

/// P_new = P_old + (1 - P_old) * p_init. Throws std::domain_error when
/// p_old is outside [0, 1].
double prophet_encounter(double p_old, double p_init);

/// P * gamma^k for k elapsed aging units.
double prophet_age(double p, double units, double gamma);

/// P_ac + (1 - P_ac) * P_ab * P_bc * beta.
double prophet_transitive(double p_ac, double p_ab, double p_bc, double beta);

/// Replicate only to a strictly better carrier; the destination always wins.
inline bool prophet_should_forward(double p_self, double p_peer, bool peer_is_destination) {
  return peer_is_destination || p_peer > p_self;
}

/// Delivery predictabilities held by one node.
class ProphetTable {
 public:
  ProphetTable(NodeId self, std::size_t node_count, const ProphetParams& params);

  /// Ages by whole units elapsed since the last aging.
  void age_to(double now);
  /// Direct update for a met peer.
  void encounter(NodeId peer);
  /// Transitive update from a met peer's table.
  void transitive(NodeId peer, std::span<const double> peer_values);

  double get(NodeId destination) const { return values_[destination]; }
  void set(NodeId destination, double p) { values_[destination] = p; }
  std::span<const double> values() const { return values_; }
  double last_aged() const { return last_aged_; }
  NodeId self() const { return self_; }

 private:
  NodeId self_;
  ProphetParams params_;
  std::vector<double> values_;
  double last_aged_ = 0.0;
};

}  // namespace oppnet
