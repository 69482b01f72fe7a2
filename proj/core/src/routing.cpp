#include "oppnet/routing.hpp"

#include <algorithm>
#include <cmath>

namespace oppnet {

std::unique_ptr<Router> make_router(ProtocolKind kind, std::size_t node_count,
                                    const ScenarioConfig& config) {
  switch (kind) {
    case ProtocolKind::epidemic:
      return std::make_unique<EpidemicRouter>();
    case ProtocolKind::prophet:
      return std::make_unique<ProphetRouter>(node_count, config.prophet);
    case ProtocolKind::bubblerap:
      return std::make_unique<BubbleRapRouter>(node_count, config.bubble);
  }
  return nullptr;
}

std::vector<ForwardDecision> plan_replications(Router& router, NodeId self, const Buffer& buffer,
                                               const PeerSummary& peer, double now) {
  std::vector<ForwardDecision> direct;
  struct Ranked {
    double priority;
    MessageId id;
  };
  std::vector<Ranked> relay;
  for (const auto& stored : buffer.entries()) {
    const Message& m = stored.message;
    if (m.expired(now) || peer.holds(m.id)) continue;
    if (m.destination == peer.id) {
      direct.push_back({m.id, true});
    } else if (router.should_replicate(self, peer.id, m, now)) {
      relay.push_back({router.priority(self, peer.id, m), m.id});
    }
  }
  std::stable_sort(relay.begin(), relay.end(),
                   [](const Ranked& a, const Ranked& b) { return a.priority > b.priority; });
  for (const auto& r : relay) direct.push_back({r.id, false});
  return direct;
}

std::vector<MessageId> epidemic_decide(const Buffer& buffer,
                                       const std::function<bool(MessageId)>& peer_holds) {
  std::vector<MessageId> out;
  for (const auto& stored : buffer.entries()) {
    if (!peer_holds(stored.message.id)) out.push_back(stored.message.id);
  }
  return out;
}

ProphetRouter::ProphetRouter(std::size_t node_count, const ProphetParams& params) {
  tables_.reserve(node_count);
  for (NodeId n = 0; n < node_count; ++n) tables_.emplace_back(n, node_count, params);
}

void ProphetRouter::on_contact_up(NodeId a, NodeId b, double now) {
  auto& ta = tables_[a];
  auto& tb = tables_[b];
  ta.age_to(now);
  tb.age_to(now);
  ta.encounter(b);
  tb.encounter(a);
  // Both transitive updates read the other side's table as exchanged,
  // i.e. after the direct update and before either transitive update.
  scratch_a_.assign(ta.values().begin(), ta.values().end());
  scratch_b_.assign(tb.values().begin(), tb.values().end());
  ta.transitive(b, scratch_b_);
  tb.transitive(a, scratch_a_);
}

bool ProphetRouter::should_replicate(NodeId self, NodeId peer, const Message& m, double now) {
  auto& ts = tables_[self];
  auto& tp = tables_[peer];
  ts.age_to(now);
  tp.age_to(now);
  return prophet_should_forward(ts.get(m.destination), tp.get(m.destination),
                                peer == m.destination);
}

double ProphetRouter::priority(NodeId, NodeId peer, const Message& m) const {
  return tables_[peer].get(m.destination);
}

BubbleRapRouter::BubbleRapRouter(std::size_t node_count, const BubbleParams& params)
    : params_(params) {
  states_.reserve(node_count);
  for (NodeId n = 0; n < node_count; ++n) states_.emplace_back(n, node_count, params);
}

void BubbleRapRouter::on_contact_up(NodeId a, NodeId b, double now) {
  states_[a].record_encounter(b, now);
  states_[b].record_encounter(a, now);
}

void BubbleRapRouter::on_contact_down(NodeId a, NodeId b, double duration, double now) {
  const std::vector<NodeId> community_a = states_[a].community();
  const std::vector<NodeId> community_b = states_[b].community();
  states_[a].update_social(b, duration, community_b, now);
  states_[b].update_social(a, duration, community_a, now);
}

bool BubbleRapRouter::should_replicate(NodeId self, NodeId peer, const Message& m, double now) {
  states_[self].roll_to(now);
  states_[peer].roll_to(now);
  return bubble_should_forward(states_[self], states_[peer], m.destination);
}

std::uint64_t BubbleRapRouter::epoch(double now) const {
  return static_cast<std::uint64_t>(std::floor(now / params_.window_length));
}

}  // namespace oppnet
