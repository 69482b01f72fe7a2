#pragma once

#include <deque>
#include <span>
#include <vector>

#include "oppnet/scenario.hpp"
#include "oppnet/types.hpp"

namespace oppnet {

/// Mean of the per-window unique-encounter counts; 0 with no history.
double centrality_from_windows(std::span<const int> counts);

/// Online social state of one node: cumulative contact time per peer, the
/// familiar set, the local community and windowed centralities.
class BubbleState {
 public:
  BubbleState(NodeId self, std::size_t node_count, const BubbleParams& params);

  /// Closes every window that ended at or before `now`.
  void roll_to(double now);
  /// Marks `peer` as met in the current window.
  void record_encounter(NodeId peer, double now);
  /// Contact with `peer` closed after `duration` seconds. `peer_community`
  /// is the peer's community (sorted) as exchanged during the contact.
  void update_social(NodeId peer, double duration, std::span<const NodeId> peer_community,
                     double now);

  NodeId self() const { return self_; }
  bool familiar(NodeId n) const { return familiar_[n]; }
  bool in_community(NodeId n) const { return member_[n]; }
  /// Sorted member list, self included.
  const std::vector<NodeId>& community() const { return community_; }
  double cumulative_contact(NodeId peer) const { return cumulative_[peer]; }
  double global_centrality() const { return global_; }
  double local_centrality() const { return local_; }
  const std::deque<int>& global_windows() const { return global_history_; }
  const std::deque<int>& local_windows() const { return local_history_; }

 private:
  void add_member(NodeId n);

  NodeId self_;
  BubbleParams params_;
  std::vector<double> cumulative_;
  std::vector<char> familiar_;
  std::vector<char> member_;
  std::vector<NodeId> community_;

  long long window_ = 0;
  std::vector<char> seen_;
  std::vector<NodeId> seen_list_;
  std::deque<int> global_history_;
  std::deque<int> local_history_;
  double global_ = 0.0;
  double local_ = 0.0;
};

/// Replicate if the peer is the destination; or the peer's community holds
/// the destination and ours does not; or both do and the peer ranks higher
/// locally; or neither does and the peer ranks higher globally.
bool bubble_should_forward(const BubbleState& self, const BubbleState& peer, NodeId destination);

}  // namespace oppnet
