#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "oppnet/engine.hpp"
#include "oppnet/rng.hpp"
#include "oppnet/scenario.hpp"

namespace oppnet::test_support {

/// A contact trace and workload on a slotted timeline. Contacts, message
/// creations and the TTL fall on slot boundaries and messages are small, so
/// every transfer a contact allows finishes well inside its slot.
struct ScriptedCase {
  int nodes = 0;
  int slots = 0;
  double slot = 100.0;
  double ttl = 0.0;
  std::vector<ContactEvent> contacts;
  TrafficSchedule schedule;
};

inline ScenarioConfig scripted_config(const ScriptedCase& c, ProtocolKind protocol) {
  ScenarioConfig config;
  config.node_count = c.nodes;
  config.groups = {default_group(GroupKind::patrol, "scripted", c.nodes, -1)};
  config.sim_duration = c.slots * c.slot;
  config.warmup = 0.0;
  config.tick = 1.0;
  config.protocol = protocol;
  config.traffic.ttl = c.ttl;
  config.traffic.pair_count = 0;
  return config;
}

inline ScriptedCase random_case(Rng& rng, int max_nodes = 8, int max_contacts = 15) {
  ScriptedCase c;
  c.nodes = static_cast<int>(rng.uniform_int(3, static_cast<std::uint64_t>(max_nodes)));
  c.slots = 12;
  c.ttl = c.slot * static_cast<double>(rng.uniform_int(1, 10));
  const auto n = static_cast<std::uint64_t>(c.nodes);
  const auto contacts = rng.uniform_int(1, static_cast<std::uint64_t>(max_contacts));
  for (std::uint64_t i = 0; i < contacts; ++i) {
    const auto a = static_cast<NodeId>(rng.uniform_int(0, n - 1));
    auto b = static_cast<NodeId>(rng.uniform_int(0, n - 2));
    if (b >= a) ++b;
    const auto start = rng.uniform_int(0, static_cast<std::uint64_t>(c.slots - 1));
    const auto len = rng.uniform_int(1, 4);
    const auto end = std::min<std::uint64_t>(start + len, static_cast<std::uint64_t>(c.slots));
    c.contacts.push_back({NodePair(a, b), static_cast<double>(start) * c.slot,
                          static_cast<double>(end) * c.slot, 11e6});
  }
  const auto messages = rng.uniform_int(1, 3);
  std::vector<double> times;
  for (std::uint64_t i = 0; i < messages; ++i) {
    times.push_back(static_cast<double>(rng.uniform_int(0, static_cast<std::uint64_t>(c.slots / 2))) *
                    c.slot);
  }
  std::sort(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto s = static_cast<NodeId>(rng.uniform_int(0, n - 1));
    auto d = static_cast<NodeId>(rng.uniform_int(0, n - 2));
    if (d >= s) ++d;
    c.schedule.entries.push_back({times[i], s, d, 1000, static_cast<MessageId>(i)});
  }
  return c;
}

/// Brute-force time-respecting reachability: within each slot a message
/// spreads over every path of contacts active in that slot; it is alive in
/// the slots before created + ttl. The destination does not relay.
inline std::set<MessageId> epidemic_reachable(const ScriptedCase& c) {
  std::set<MessageId> delivered;
  for (const auto& e : c.schedule.entries) {
    std::vector<char> reached(static_cast<std::size_t>(c.nodes), 0);
    reached[e.source] = 1;
    const int first = static_cast<int>(e.time / c.slot);
    const int last = std::min(c.slots, static_cast<int>((e.time + c.ttl) / c.slot));
    for (int s = first; s < last; ++s) {
      const double t = s * c.slot;
      for (bool grew = true; grew;) {
        grew = false;
        for (const auto& ct : c.contacts) {
          if (!(ct.start <= t && t < ct.end)) continue;
          const NodeId a = ct.pair.first;
          const NodeId b = ct.pair.second;
          if (reached[a] && !reached[b] && a != e.destination) {
            reached[b] = 1;
            grew = true;
          }
          if (reached[b] && !reached[a] && b != e.destination) {
            reached[a] = 1;
            grew = true;
          }
        }
      }
    }
    if (reached[e.destination]) delivered.insert(e.id);
  }
  return delivered;
}

inline std::set<MessageId> delivered_set(const RunResult& r) {
  std::set<MessageId> out;
  for (const auto& m : r.messages) {
    if (m.delivered) out.insert(m.id);
  }
  return out;
}

inline RunResult run_scripted(const ScriptedCase& c, ProtocolKind protocol,
                              TransferConcurrency concurrency = TransferConcurrency::node,
                              bool check_invariants = false) {
  ScenarioConfig config = scripted_config(c, protocol);
  config.radio.concurrency = concurrency;
  RunOptions options;
  options.schedule = &c.schedule;
  options.scripted_contacts = &c.contacts;
  options.check_invariants = check_invariants;
  return run(config, 1, options);
}

}  // namespace oppnet::test_support
