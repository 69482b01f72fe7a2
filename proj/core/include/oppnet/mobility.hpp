#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "oppnet/map_graph.hpp"
#include "oppnet/rng.hpp"
#include "oppnet/scenario.hpp"
#include "oppnet/types.hpp"

namespace oppnet {

/// Fixed per-person assignments drawn once when the model is built.
struct PersonProfile {
  NodeId node = 0;
  int group = 0;  // people group (map tag index)
  WaypointId home = 0;
  int office = 0;  // index into MapTags::offices
  int route = -1;  // bus route this person may ride
};

struct EveningActivity {
  WaypointId spot = 0;
  std::vector<NodeId> members;  // includes the person itself; size <= evening_max_group
  double duration = 0.0;        // s
};

/// One day of the home -> office -> (evening) -> home cycle.
struct DailySchedule {
  int day = 0;
  double work_start = 0.0;  // absolute simulation time
  double office_hours = 0.0;
  WaypointId home = 0;
  int office = 0;
  std::optional<EveningActivity> evening;
  // Bus route per leg (to office, to evening spot, to home); -1 walks.
  std::array<int, 3> transport{-1, -1, -1};
};

/// Draws one day of schedules for the members of one people group. Evening
/// participants are shuffled and split into parties of 1..evening_max_group,
/// each sharing a meeting spot and a duration.
std::vector<DailySchedule> build_daily_schedules(std::span<const PersonProfile> members, int day,
                                                 const WorkdayConfig& workday,
                                                 const MapTags& tags, Rng& rng);

enum class MotionMode { moving, paused, waiting_bus, riding };
enum class PauseKind { stop, office, evening };
enum class PersonPhase { at_home, commuting, at_office, at_evening };
enum class TripGoal { office, evening, home };

struct TripStep {
  enum class Kind { walk, bus } kind = Kind::walk;
  WaypointId target = 0;  // walk destination or alighting stop
  int route = -1;
  WaypointId board = 0;
};

/// Per-node kinematic and behavioural state.
struct NodeMotion {
  GroupKind kind = GroupKind::person;
  int group = 0;  // index into ScenarioConfig::groups
  Vec2 position;
  WaypointId at = 0;  // last waypoint reached
  Path path;
  std::size_t edge = 0;  // path.waypoints[edge] -> path.waypoints[edge + 1]
  double offset = 0.0;   // metres along the current edge
  double speed = 0.0;
  double path_progress = 0.0;  // metres along the whole path
  MotionMode mode = MotionMode::paused;
  double pause_until = 0.0;

  // bus
  std::size_t next_stop = 0;
  int route = -1;

  // person
  PersonPhase phase = PersonPhase::at_home;
  std::optional<DailySchedule> schedule;
  bool schedule_used = false;
  TripGoal goal = TripGoal::home;
  std::vector<TripStep> trip;
  std::size_t trip_step = 0;
  double leave_at = 0.0;
  NodeId riding_bus = 0;
};

class MobilityObserver {
 public:
  virtual ~MobilityObserver() = default;
  virtual void on_pause(NodeId, GroupKind, PauseKind, double /*duration*/) {}
  virtual void on_leg(NodeId, GroupKind, double /*speed*/) {}
  virtual void on_bus_stop(NodeId /*bus*/, int /*route*/, WaypointId /*stop*/) {}
  virtual void on_schedule(NodeId, const DailySchedule&) {}
};

/// Moves every node of a scenario over a map: patrols follow shortest paths
/// to random waypoints, buses cycle their route's stops, people follow a
/// daily home/office/evening schedule and may ride buses.
class MobilityModel {
 public:
  /// Throws ConfigError when a group references a tag the map lacks.
  MobilityModel(const ScenarioConfig& config, const MapGraph& map, Rng rng,
                MobilityObserver* observer = nullptr);

  /// Advances every node from now() to now() + dt.
  void step(double dt);

  double now() const { return now_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const Vec2> positions() const { return positions_; }
  const NodeMotion& node(NodeId id) const { return nodes_.at(id); }
  const PersonProfile* profile(NodeId id) const;
  double max_speed() const { return max_speed_; }

 private:
  void build_schedules(int day);
  void begin_path(NodeId id, WaypointId target);
  void advance(NodeId id, double distance);
  void pause(NodeId id, double until);
  void on_pause_end(NodeId id);
  void on_arrival(NodeId id);
  void start_trip(NodeId id, TripGoal goal);
  void continue_trip(NodeId id);
  void arrive(NodeId id);
  void office_wander(NodeId id);
  void step_rider(NodeId id);
  double draw_pause(NodeId id);

  const ScenarioConfig* config_;
  const MapGraph* map_;
  PathFinder paths_;
  Rng rng_;
  MobilityObserver* observer_;
  std::vector<NodeMotion> nodes_;
  std::vector<Vec2> positions_;
  std::vector<PersonProfile> profiles_;           // person nodes only
  std::vector<int> profile_index_;                // node -> profiles_ index or -1
  std::vector<std::vector<NodeId>> people_by_group_;
  std::vector<std::vector<NodeId>> buses_by_route_;
  double now_ = 0.0;
  double end_of_step_ = 0.0;
  int schedule_day_ = -1;
  double max_speed_ = 0.0;
};

}  // namespace oppnet
