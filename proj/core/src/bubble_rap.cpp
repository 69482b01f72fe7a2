#include "oppnet/bubble_rap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oppnet {

double centrality_from_windows(std::span<const int> counts) {
  if (counts.empty()) return 0.0;
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  return total / static_cast<double>(counts.size());
}

BubbleState::BubbleState(NodeId self, std::size_t node_count, const BubbleParams& params)
    : self_(self),
      params_(params),
      cumulative_(node_count, 0.0),
      familiar_(node_count, 0),
      member_(node_count, 0),
      seen_(node_count, 0) {
  add_member(self);
}

void BubbleState::add_member(NodeId n) {
  if (member_[n]) return;
  member_[n] = 1;
  community_.insert(std::lower_bound(community_.begin(), community_.end(), n), n);
}

void BubbleState::roll_to(double now) {
  const auto target = static_cast<long long>(std::floor(now / params_.window_length));
  if (target <= window_) return;
  const auto keep = static_cast<std::size_t>(params_.window_count);
  auto push = [keep](std::deque<int>& history, int value) {
    history.push_back(value);
    while (history.size() > keep) history.pop_front();
  };
  int local = 0;
  for (NodeId n : seen_list_) local += member_[n] ? 1 : 0;
  push(global_history_, static_cast<int>(seen_list_.size()));
  push(local_history_, local);
  for (NodeId n : seen_list_) seen_[n] = 0;
  seen_list_.clear();
  // Windows that passed without any contact count as zero.
  const long long skipped = std::min<long long>(target - window_ - 1, static_cast<long long>(keep));
  for (long long w = 0; w < skipped; ++w) {
    push(global_history_, 0);
    push(local_history_, 0);
  }
  window_ = target;

  const std::vector<int> g(global_history_.begin(), global_history_.end());
  const std::vector<int> l(local_history_.begin(), local_history_.end());
  global_ = centrality_from_windows(g);
  local_ = centrality_from_windows(l);
}

void BubbleState::record_encounter(NodeId peer, double now) {
  roll_to(now);
  if (!seen_[peer]) {
    seen_[peer] = 1;
    seen_list_.push_back(peer);
  }
}

void BubbleState::update_social(NodeId peer, double duration, std::span<const NodeId> peer_community,
                                double now) {
  record_encounter(peer, now);
  cumulative_[peer] += std::max(0.0, duration);
  if (!familiar_[peer] && cumulative_[peer] >= params_.familiar_threshold) {
    familiar_[peer] = 1;
    add_member(peer);
  }
  if (peer_community.empty()) return;
  std::size_t shared = 0;
  for (NodeId n : peer_community) shared += member_[n] ? 1 : 0;
  const double overlap = static_cast<double>(shared) / static_cast<double>(peer_community.size());
  if (overlap > params_.merge_fraction) {
    for (NodeId n : peer_community) add_member(n);
  }
}

bool bubble_should_forward(const BubbleState& self, const BubbleState& peer, NodeId destination) {
  if (peer.self() == destination) return true;
  const bool peer_has = peer.in_community(destination);
  const bool self_has = self.in_community(destination);
  if (peer_has && !self_has) return true;
  if (peer_has && self_has) return peer.local_centrality() > self.local_centrality();
  if (!peer_has && !self_has) return peer.global_centrality() > self.global_centrality();
  return false;
}

}  // namespace oppnet
