#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "oppnet/bubble_rap.hpp"
#include "oppnet/buffer.hpp"
#include "oppnet/message.hpp"
#include "oppnet/prophet.hpp"
#include "oppnet/scenario.hpp"

namespace oppnet {

struct ForwardDecision {
  MessageId message = 0;
  bool to_destination = false;  // the peer is the message's destination

  friend bool operator==(const ForwardDecision&, const ForwardDecision&) = default;
};

/// What a node learns about its peer when a contact comes up.
struct PeerSummary {
  NodeId id = 0;
  std::function<bool(MessageId)> holds;
};

/// Per-run protocol state for every node. Implementations are driven by the
/// engine's event loop only.
class Router {
 public:
  virtual ~Router() = default;

  virtual ProtocolKind kind() const = 0;
  /// Whether contacts change protocol state (and so can change decisions).
  virtual bool stateful() const = 0;

  virtual void on_contact_up(NodeId a, NodeId b, double now) = 0;
  virtual void on_contact_down(NodeId a, NodeId b, double duration, double now) = 0;

  /// Replication decision for a message `self` holds and `peer` lacks.
  virtual bool should_replicate(NodeId self, NodeId peer, const Message& m, double now) = 0;
  /// Larger is offered earlier; ties keep buffer (receipt) order.
  virtual double priority(NodeId /*self*/, NodeId /*peer*/, const Message& /*m*/) const { return 0.0; }
  /// Changes whenever decisions may change without a contact event.
  virtual std::uint64_t epoch(double /*now*/) const { return 0; }
};

std::unique_ptr<Router> make_router(ProtocolKind kind, std::size_t node_count,
                                    const ScenarioConfig& config);

/// The replication queue for a fresh (or refreshed) contact: messages bound
/// for the peer first, then the rest in protocol order. Never includes a
/// message the peer holds or one that has expired.
std::vector<ForwardDecision> plan_replications(Router& router, NodeId self, const Buffer& buffer,
                                               const PeerSummary& peer, double now);

/// Flooding: every message the peer lacks.
std::vector<MessageId> epidemic_decide(const Buffer& buffer,
                                       const std::function<bool(MessageId)>& peer_holds);

class EpidemicRouter final : public Router {
 public:
  ProtocolKind kind() const override { return ProtocolKind::epidemic; }
  bool stateful() const override { return false; }
  void on_contact_up(NodeId, NodeId, double) override {}
  void on_contact_down(NodeId, NodeId, double, double) override {}
  bool should_replicate(NodeId, NodeId, const Message&, double) override { return true; }
};

class ProphetRouter final : public Router {
 public:
  ProphetRouter(std::size_t node_count, const ProphetParams& params);

  ProtocolKind kind() const override { return ProtocolKind::prophet; }
  bool stateful() const override { return true; }
  void on_contact_up(NodeId a, NodeId b, double now) override;
  void on_contact_down(NodeId, NodeId, double, double) override {}
  bool should_replicate(NodeId self, NodeId peer, const Message& m, double now) override;
  double priority(NodeId self, NodeId peer, const Message& m) const override;

  const ProphetTable& table(NodeId n) const { return tables_.at(n); }

 private:
  std::vector<ProphetTable> tables_;
  std::vector<double> scratch_a_;
  std::vector<double> scratch_b_;
};

class BubbleRapRouter final : public Router {
 public:
  BubbleRapRouter(std::size_t node_count, const BubbleParams& params);

  ProtocolKind kind() const override { return ProtocolKind::bubblerap; }
  bool stateful() const override { return true; }
  void on_contact_up(NodeId a, NodeId b, double now) override;
  void on_contact_down(NodeId a, NodeId b, double duration, double now) override;
  bool should_replicate(NodeId self, NodeId peer, const Message& m, double now) override;
  std::uint64_t epoch(double now) const override;

  const BubbleState& state(NodeId n) const { return states_.at(n); }

 private:
  BubbleParams params_;
  std::vector<BubbleState> states_;
};

}  // namespace oppnet
