#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oppnet/rng.hpp"
#include "oppnet/routing.hpp"

namespace oppnet {
namespace {

Message msg(MessageId id, NodeId dst, double created = 0.0, double ttl = 1000.0) {
  return Message{id, 0, dst, 1000, created, ttl};
}

TEST(Epidemic, SetDifference) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Buffer b(1000000);
    std::set<MessageId> mine, theirs;
    for (MessageId id = 0; id < 40; ++id) {
      if (rng.bernoulli(0.5)) {
        b.admit(msg(id, 3), 0.0);
        mine.insert(id);
      }
      if (rng.bernoulli(0.5)) theirs.insert(id);
    }
    const auto out = epidemic_decide(b, [&](MessageId id) { return theirs.count(id) > 0; });
    std::vector<MessageId> expected;
    std::set_difference(mine.begin(), mine.end(), theirs.begin(), theirs.end(),
                        std::back_inserter(expected));
    EXPECT_EQ(out, expected);
  }
}

TEST(Epidemic, DisjointBuffers) {
  Buffer a(1000000), b(1000000);
  for (MessageId id : {0u, 1u, 2u}) a.admit(msg(id, 5), 0.0);
  for (MessageId id : {3u, 4u}) b.admit(msg(id, 5), 0.0);
  auto holds = [](const Buffer& buf) { return [&buf](MessageId id) { return buf.contains(id); }; };
  EXPECT_EQ(epidemic_decide(a, holds(b)).size(), 3u);
  EXPECT_EQ(epidemic_decide(b, holds(a)).size(), 2u);
}

TEST(Plan, DestinationFirstThenReceiptOrder) {
  EpidemicRouter r;
  Buffer b(1000000);
  b.admit(msg(0, 4), 0.0);
  b.admit(msg(1, 7), 1.0);
  b.admit(msg(2, 4), 2.0);
  b.admit(msg(3, 7), 3.0);
  PeerSummary peer{7, [](MessageId) { return false; }};
  const auto plan = plan_replications(r, 0, b, peer, 5.0);
  const std::vector<ForwardDecision> expected{{1, true}, {3, true}, {0, false}, {2, false}};
  EXPECT_EQ(plan, expected);
}

TEST(Plan, SkipsHeldAndExpired) {
  EpidemicRouter r;
  Buffer b(1000000);
  b.admit(msg(0, 4, 0.0, 10.0), 0.0);
  b.admit(msg(1, 4), 0.0);
  b.admit(msg(2, 4), 0.0);
  PeerSummary peer{9, [](MessageId id) { return id == 2; }};
  const auto plan = plan_replications(r, 0, b, peer, 10.0);
  ASSERT_EQ(plan.size(), 1u);
  EXPECT_EQ(plan[0].message, 1u);
}

TEST(Plan, ProphetOrdersByPeerPredictability) {
  ProphetParams params;
  ProphetRouter r(6, params);
  // Peer 1 learns a strong P for 3 and a weaker one for 4 (via 2).
  r.on_contact_up(1, 3, 0.0);
  r.on_contact_up(2, 4, 0.0);
  r.on_contact_up(1, 2, 0.0);
  Buffer b(1000000);
  b.admit(msg(0, 4), 0.0);
  b.admit(msg(1, 3), 0.0);
  b.admit(msg(2, 5), 0.0);  // nobody knows 5: tie at zero, held
  PeerSummary peer{1, [](MessageId) { return false; }};
  const auto plan = plan_replications(r, 0, b, peer, 0.0);
  ASSERT_EQ(plan.size(), 2u);
  EXPECT_EQ(plan[0].message, 1u);
  EXPECT_EQ(plan[1].message, 0u);
}

TEST(Plan, ProphetIsFilterOfEpidemic) {
  ProphetParams params;
  ProphetRouter prophet(8, params);
  EpidemicRouter epidemic;
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto a = static_cast<NodeId>(rng.uniform_int(0, 7));
    auto c = static_cast<NodeId>(rng.uniform_int(0, 6));
    if (c >= a) ++c;
    prophet.on_contact_up(a, c, i * 10.0);
  }
  Buffer b(1000000);
  for (MessageId id = 0; id < 30; ++id) b.admit(msg(id, static_cast<NodeId>(id % 8)), 0.0);
  for (NodeId peer = 1; peer < 8; ++peer) {
    PeerSummary s{peer, [](MessageId id) { return id % 5 == 0; }};
    const auto p = plan_replications(prophet, 0, b, s, 500.0);
    const auto e = plan_replications(epidemic, 0, b, s, 500.0);
    EXPECT_LE(p.size(), e.size());
    for (const auto& d : p) {
      EXPECT_TRUE(std::any_of(e.begin(), e.end(),
                              [&](const ForwardDecision& x) { return x.message == d.message; }));
    }
  }
}

TEST(MakeRouter, Kinds) {
  ScenarioConfig c;
  for (ProtocolKind k : {ProtocolKind::epidemic, ProtocolKind::prophet, ProtocolKind::bubblerap}) {
    EXPECT_EQ(make_router(k, 4, c)->kind(), k);
  }
  EXPECT_FALSE(make_router(ProtocolKind::epidemic, 4, c)->stateful());
}

}  // namespace
}  // namespace oppnet
