#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oppnet/mobility.hpp"

namespace oppnet {
namespace {

struct Recorder : MobilityObserver {
  std::vector<std::pair<GroupKind, double>> pauses_stop;
  std::vector<double> pauses_office;
  std::vector<double> pauses_evening;
  std::vector<std::pair<GroupKind, double>> legs;
  std::map<NodeId, std::vector<WaypointId>> bus_stops;
  std::vector<DailySchedule> schedules;

  void on_pause(NodeId, GroupKind kind, PauseKind what, double d) override {
    if (what == PauseKind::stop) pauses_stop.emplace_back(kind, d);
    if (what == PauseKind::office) pauses_office.push_back(d);
    if (what == PauseKind::evening) pauses_evening.push_back(d);
  }
  void on_leg(NodeId, GroupKind kind, double speed) override { legs.emplace_back(kind, speed); }
  void on_bus_stop(NodeId bus, int, WaypointId stop) override { bus_stops[bus].push_back(stop); }
  void on_schedule(NodeId, const DailySchedule& s) override { schedules.push_back(s); }
};

std::vector<PersonProfile> profiles(int count, const MapTags& tags, int group) {
  std::vector<PersonProfile> out;
  const auto offices = tags.offices_of(group);
  for (int i = 0; i < count; ++i) {
    PersonProfile p;
    p.node = static_cast<NodeId>(i);
    p.group = group;
    p.home = tags.homes[group][static_cast<std::size_t>(i) % tags.homes[group].size()];
    p.office = offices[static_cast<std::size_t>(i) % offices.size()];
    p.route = group;
    out.push_back(p);
  }
  return out;
}

TEST(DailySchedule, DistributionsOverTenThousand) {
  const auto map = generate_map(4500, 3400, 1);
  const WorkdayConfig workday;
  const auto members = profiles(16, map.tags(), 2);
  Rng rng(123);
  int total = 0, evening = 0;
  for (int day = 0; total < 10000; ++day) {
    const auto schedules = build_daily_schedules(members, day, workday, map.tags(), rng);
    ASSERT_EQ(schedules.size(), members.size());
    std::map<NodeId, const DailySchedule*> by_node;
    for (std::size_t i = 0; i < schedules.size(); ++i) by_node[members[i].node] = &schedules[i];
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      const auto& s = schedules[i];
      ++total;
      EXPECT_EQ(s.day, day);
      EXPECT_DOUBLE_EQ(s.office_hours, 28800.0);
      EXPECT_GE(s.work_start, day * 86400.0 + 7 * 3600.0);
      EXPECT_LE(s.work_start, day * 86400.0 + 9 * 3600.0);
      EXPECT_EQ(s.home, members[i].home);
      EXPECT_EQ(s.office, members[i].office);
      for (int r : s.transport) EXPECT_TRUE(r == -1 || r == members[i].route);
      if (!s.evening) continue;
      ++evening;
      const auto& e = *s.evening;
      EXPECT_GE(e.duration, 3600.0);
      EXPECT_LE(e.duration, 7200.0);
      EXPECT_GE(e.members.size(), 1u);
      EXPECT_LE(e.members.size(), 3u);
      EXPECT_NE(std::find(e.members.begin(), e.members.end(), members[i].node), e.members.end());
      const auto& spots = map.tags().meeting_spots[2];
      EXPECT_NE(std::find(spots.begin(), spots.end(), e.spot), spots.end());
      for (NodeId other : e.members) {
        ASSERT_TRUE(by_node.count(other));
        const auto& oe = by_node[other]->evening;
        ASSERT_TRUE(oe.has_value());
        EXPECT_EQ(oe->spot, e.spot);
        EXPECT_EQ(oe->duration, e.duration);
        EXPECT_EQ(oe->members, e.members);
      }
    }
  }
  const double fraction = static_cast<double>(evening) / total;
  EXPECT_GE(fraction, 0.48);
  EXPECT_LE(fraction, 0.52);
}

TEST(Mobility, StraightEdgeKinematics) {
  MapGraph map;
  map.add_waypoint({0, 0});
  map.add_waypoint({10, 0});
  map.add_straight_edge(0, 1);
  ScenarioConfig c;
  c.node_count = 1;
  c.groups = {default_group(GroupKind::patrol, "p", 1, -1)};
  c.groups[0].speed = {1.0, 1.0};
  MobilityModel m(c, map, Rng(4));
  const Vec2 start = m.positions()[0];
  m.step(10.0);
  const Vec2 end = m.positions()[0];
  EXPECT_DOUBLE_EQ(distance(start, end), 10.0);
  EXPECT_TRUE(end == map.position(0) || end == map.position(1));
  EXPECT_EQ(m.node(0).mode, MotionMode::paused);
  // Paused: position unchanged while pause_until > now.
  const double until = m.node(0).pause_until;
  ASSERT_GT(until, m.now());
  m.step(1.0);
  EXPECT_EQ(m.positions()[0], end);
  EXPECT_GE(until - 10.0, 100.0);
  EXPECT_LE(until - 10.0, 300.0);
}

class DefaultScenarioMobility : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new ScenarioConfig(default_uef_scenario());
    map_ = new MapGraph(generate_map(4500, 3400, 1));
  }
  static void TearDownTestSuite() {
    delete config_;
    delete map_;
  }
  static ScenarioConfig* config_;
  static MapGraph* map_;
};
ScenarioConfig* DefaultScenarioMobility::config_ = nullptr;
MapGraph* DefaultScenarioMobility::map_ = nullptr;

TEST_F(DefaultScenarioMobility, OneDayProperties) {
  Recorder rec;
  MobilityModel m(*config_, *map_, Rng(77), &rec);
  const double dt = 1.0;
  std::vector<Vec2> prev(m.positions().begin(), m.positions().end());
  int riding_ticks = 0;
  for (int k = 0; k < 86400; ++k) {
    m.step(dt);
    const auto pos = m.positions();
    for (NodeId i = 0; i < pos.size(); ++i) {
      ASSERT_LE(distance(prev[i], pos[i]), m.max_speed() * dt + 1e-9) << "node " << i;
      const auto& n = m.node(i);
      if (n.mode == MotionMode::riding) {
        ++riding_ticks;
        ASSERT_EQ(pos[i], pos[n.riding_bus]);
      }
    }
    prev.assign(pos.begin(), pos.end());
  }
  EXPECT_GT(riding_ticks, 0);

  for (const auto& [kind, d] : rec.pauses_stop) {
    const Range r = kind == GroupKind::patrol ? Range{100, 300} : Range{10, 30};
    EXPECT_TRUE(r.contains(d)) << d;
  }
  for (double d : rec.pauses_office) EXPECT_TRUE((Range{60, 14400}).contains(d)) << d;
  for (double d : rec.pauses_evening) EXPECT_TRUE((Range{3600, 7200}).contains(d)) << d;
  EXPECT_FALSE(rec.pauses_office.empty());
  EXPECT_FALSE(rec.pauses_evening.empty());
  for (const auto& [kind, speed] : rec.legs) {
    const Range r = kind == GroupKind::person ? Range{0.8, 1.4} : Range{7, 10};
    EXPECT_TRUE(r.contains(speed)) << speed;
  }

  // Buses visit their stops in the route's cyclic order.
  ASSERT_FALSE(rec.bus_stops.empty());
  for (const auto& [bus, visited] : rec.bus_stops) {
    const auto& stops = map_->tags().bus_routes[m.node(bus).route];
    auto it = std::find(stops.begin(), stops.end(), visited.front());
    ASSERT_NE(it, stops.end());
    std::size_t idx = static_cast<std::size_t>(it - stops.begin());
    for (auto stop : visited) {
      EXPECT_EQ(stop, stops[idx]);
      idx = (idx + 1) % stops.size();
    }
  }
}

TEST_F(DefaultScenarioMobility, Deterministic) {
  MobilityModel a(*config_, *map_, Rng(5));
  MobilityModel b(*config_, *map_, Rng(5));
  MobilityModel c(*config_, *map_, Rng(6));
  bool differs = false;
  for (int k = 0; k < 30000; ++k) {
    a.step(1.0);
    b.step(1.0);
    c.step(1.0);
    for (NodeId i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a.positions()[i], b.positions()[i]);
      differs |= !(a.positions()[i] == c.positions()[i]);
    }
  }
  EXPECT_TRUE(differs);
}

TEST_F(DefaultScenarioMobility, PeopleWorkEightHours) {
  Recorder rec;
  MobilityModel m(*config_, *map_, Rng(8), &rec);
  std::map<NodeId, double> arrived;
  std::map<NodeId, double> left;
  for (int k = 0; k < 86400; ++k) {
    m.step(1.0);
    for (NodeId i = 0; i < m.size(); ++i) {
      const auto& n = m.node(i);
      if (n.kind != GroupKind::person) continue;
      if (n.phase == PersonPhase::at_office && !arrived.count(i)) arrived[i] = m.now();
      if (arrived.count(i) && !left.count(i) && n.phase != PersonPhase::at_office) {
        left[i] = m.now();
      }
    }
  }
  ASSERT_GT(left.size(), 100u);
  for (const auto& [node, t] : left) {
    const double stay = t - arrived[node];
    EXPECT_GE(stay, 28800.0 - 1.0) << node;
    // A walk between office points under way at quitting time is finished
    // first: at most 100 m at 0.8 m/s.
    EXPECT_LE(stay, 28800.0 + 126.0) << node;
  }
}

TEST(Mobility, MissingTagsRejected) {
  MapGraph map;
  map.add_waypoint({0, 0});
  map.add_waypoint({10, 0});
  map.add_straight_edge(0, 1);
  const ScenarioConfig c = default_uef_scenario();
  EXPECT_THROW(MobilityModel(c, map, Rng(1)), ConfigError);
}

}  // namespace
}  // namespace oppnet
