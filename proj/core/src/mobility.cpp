#include "oppnet/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace oppnet {

namespace {

constexpr double kForever = std::numeric_limits<double>::infinity();

template <class T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.uniform_int(0, items.size() - 1)];
}

}  // namespace

std::vector<DailySchedule> build_daily_schedules(std::span<const PersonProfile> members, int day,
                                                 const WorkdayConfig& workday,
                                                 const MapTags& tags, Rng& rng) {
  std::vector<DailySchedule> out(members.size());
  std::vector<std::size_t> participants;
  const double midnight = day * kSecondsPerDay;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    auto& s = out[i];
    s.day = day;
    s.work_start = midnight + rng.uniform(workday.work_start.min, workday.work_start.max);
    s.office_hours = workday.office_hours;
    s.home = m.home;
    s.office = m.office;
    for (auto& leg : s.transport) {
      const bool bus = rng.bernoulli(workday.bus_probability);
      leg = (bus && m.route >= 0) ? m.route : -1;
    }
    if (rng.bernoulli(workday.evening_probability)) participants.push_back(i);
  }

  for (std::size_t i = participants.size(); i > 1; --i) {
    std::swap(participants[i - 1], participants[rng.uniform_int(0, i - 1)]);
  }
  std::size_t next = 0;
  while (next < participants.size()) {
    const auto party = std::min<std::size_t>(
        rng.uniform_int(1, static_cast<std::uint64_t>(workday.evening_max_group)),
        participants.size() - next);
    EveningActivity activity;
    const int group = members[participants[next]].group;
    activity.spot = pick(tags.meeting_spots.at(group), rng);
    activity.duration = rng.uniform(workday.evening_duration.min, workday.evening_duration.max);
    for (std::size_t k = 0; k < party; ++k) {
      activity.members.push_back(members[participants[next + k]].node);
    }
    std::sort(activity.members.begin(), activity.members.end());
    for (std::size_t k = 0; k < party; ++k) out[participants[next + k]].evening = activity;
    next += party;
  }
  return out;
}

MobilityModel::MobilityModel(const ScenarioConfig& config, const MapGraph& map, Rng rng,
                             MobilityObserver* observer)
    : config_(&config), map_(&map), paths_(map), rng_(std::move(rng)), observer_(observer) {
  const auto& tags = map.tags();
  auto bad = [](const std::string& msg) {
    throw ConfigError(ConfigError::Kind::validation, msg);
  };

  nodes_.resize(static_cast<std::size_t>(config.node_count));
  positions_.resize(nodes_.size());
  profile_index_.assign(nodes_.size(), -1);
  people_by_group_.resize(tags.homes.size());
  buses_by_route_.resize(tags.bus_routes.size());

  NodeId id = 0;
  for (std::size_t gi = 0; gi < config.groups.size(); ++gi) {
    const auto& g = config.groups[gi];
    max_speed_ = std::max(max_speed_, g.speed.max);
    const std::string where = "group '" + g.name + "': ";
    if (g.kind == GroupKind::person) {
      if (g.map_index < 0 || static_cast<std::size_t>(g.map_index) >= tags.homes.size() ||
          tags.homes[g.map_index].empty()) {
        bad(where + "map has no homes for people group " + std::to_string(g.map_index));
      }
      if (tags.offices_of(g.map_index).empty()) bad(where + "map has no offices for this group");
      if (static_cast<std::size_t>(g.map_index) >= tags.meeting_spots.size() ||
          tags.meeting_spots[g.map_index].empty()) {
        bad(where + "map has no meeting spots for this group");
      }
    }
    if (g.kind == GroupKind::bus && (g.map_index < 0 ||
                                     static_cast<std::size_t>(g.map_index) >= tags.bus_routes.size())) {
      bad(where + "map has no bus route " + std::to_string(g.map_index));
    }

    for (int k = 0; k < g.size; ++k, ++id) {
      auto& n = nodes_[id];
      n.kind = g.kind;
      n.group = static_cast<int>(gi);
      n.mode = MotionMode::paused;
      n.pause_until = 0.0;
      switch (g.kind) {
        case GroupKind::patrol:
          n.at = static_cast<WaypointId>(rng_.uniform_int(0, map.size() - 1));
          break;
        case GroupKind::bus: {
          const auto& stops = tags.bus_routes[g.map_index];
          const std::size_t start = static_cast<std::size_t>(k) * stops.size() / g.size;
          n.route = g.map_index;
          n.at = stops[start];
          n.next_stop = (start + 1) % stops.size();
          buses_by_route_[g.map_index].push_back(id);
          break;
        }
        case GroupKind::person: {
          PersonProfile p;
          p.node = id;
          p.group = g.map_index;
          p.home = pick(tags.homes[g.map_index], rng_);
          p.office = pick(tags.offices_of(g.map_index), rng_);
          p.route = tags.bus_routes.empty()
                        ? -1
                        : g.map_index % static_cast<int>(tags.bus_routes.size());
          profile_index_[id] = static_cast<int>(profiles_.size());
          profiles_.push_back(p);
          people_by_group_[g.map_index].push_back(id);
          n.at = p.home;
          n.phase = PersonPhase::at_home;
          n.pause_until = kForever;
          break;
        }
      }
      n.position = map.position(n.at);
      positions_[id] = n.position;
    }
  }
  build_schedules(0);
}

const PersonProfile* MobilityModel::profile(NodeId id) const {
  const int i = profile_index_.at(id);
  return i < 0 ? nullptr : &profiles_[i];
}

void MobilityModel::build_schedules(int day) {
  schedule_day_ = day;
  std::vector<PersonProfile> members;
  for (const auto& ids : people_by_group_) {
    if (ids.empty()) continue;
    members.clear();
    for (NodeId id : ids) members.push_back(profiles_[profile_index_[id]]);
    auto schedules = build_daily_schedules(members, day, config_->workday, map_->tags(), rng_);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto& n = nodes_[ids[i]];
      n.schedule = std::move(schedules[i]);
      n.schedule_used = false;
      if (observer_) observer_->on_schedule(ids[i], *n.schedule);
      if (n.phase == PersonPhase::at_home && n.mode == MotionMode::paused &&
          !std::isfinite(n.pause_until)) {
        n.pause_until = n.schedule->work_start;
      }
    }
  }
}

void MobilityModel::step(double dt) {
  const double t = now_;
  end_of_step_ = t + dt;
  const int day = static_cast<int>(std::floor(t / kSecondsPerDay));
  if (day > schedule_day_) build_schedules(day);

  for (NodeId id = 0; id < nodes_.size(); ++id) {
    auto& n = nodes_[id];
    if (n.mode == MotionMode::waiting_bus || n.mode == MotionMode::riding) continue;
    if (n.mode == MotionMode::paused) {
      if (n.pause_until > t) continue;
      on_pause_end(id);
    }
    if (n.mode == MotionMode::moving) advance(id, n.speed * dt);
  }
  // Riders follow their bus, so they move after every bus has.
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const auto mode = nodes_[id].mode;
    if (mode == MotionMode::waiting_bus || mode == MotionMode::riding) step_rider(id);
  }
  for (NodeId id = 0; id < nodes_.size(); ++id) positions_[id] = nodes_[id].position;
  now_ = end_of_step_;
}

void MobilityModel::begin_path(NodeId id, WaypointId target) {
  auto& n = nodes_[id];
  const auto& g = config_->groups[n.group];
  n.path = paths_.shortest_path(n.at, target);
  n.edge = 0;
  n.offset = 0.0;
  n.path_progress = 0.0;
  n.speed = rng_.uniform(g.speed.min, g.speed.max);
  n.mode = MotionMode::moving;
  if (observer_) observer_->on_leg(id, n.kind, n.speed);
}

void MobilityModel::advance(NodeId id, double distance) {
  auto& n = nodes_[id];
  const auto& wps = n.path.waypoints;
  while (n.mode == MotionMode::moving) {
    const WaypointId a = wps[n.edge];
    const WaypointId b = wps[n.edge + 1];
    const double len = map_->edge_length(a, b);
    const double remaining = len - n.offset;
    if (distance >= remaining) {
      distance -= remaining;
      n.path_progress += remaining;
      n.offset = 0.0;
      ++n.edge;
      n.at = b;
      n.position = map_->position(b);
      if (n.edge + 1 == wps.size()) {
        n.mode = MotionMode::paused;
        n.pause_until = end_of_step_;
        on_arrival(id);
        return;
      }
      continue;
    }
    n.offset += distance;
    n.path_progress += distance;
    const Vec2& pa = map_->position(a);
    const Vec2& pb = map_->position(b);
    const double f = len > 0.0 ? n.offset / len : 0.0;
    n.position = {pa.x + (pb.x - pa.x) * f, pa.y + (pb.y - pa.y) * f};
    return;
  }
}

void MobilityModel::pause(NodeId id, double until) {
  auto& n = nodes_[id];
  n.mode = MotionMode::paused;
  n.pause_until = until;
}

double MobilityModel::draw_pause(NodeId id) {
  const auto& g = config_->groups[nodes_[id].group];
  return rng_.uniform(g.pause.min, g.pause.max);
}

void MobilityModel::on_pause_end(NodeId id) {
  auto& n = nodes_[id];
  switch (n.kind) {
    case GroupKind::patrol: {
      WaypointId target = n.at;
      while (target == n.at && map_->size() > 1) {
        target = static_cast<WaypointId>(rng_.uniform_int(0, map_->size() - 1));
      }
      begin_path(id, target);
      return;
    }
    case GroupKind::bus: {
      const auto& stops = map_->tags().bus_routes[n.route];
      const WaypointId target = stops[n.next_stop];
      n.next_stop = (n.next_stop + 1) % stops.size();
      begin_path(id, target);
      return;
    }
    case GroupKind::person:
      break;
  }
  switch (n.phase) {
    case PersonPhase::at_home:
      if (n.schedule && !n.schedule_used) {
        n.schedule_used = true;
        start_trip(id, TripGoal::office);
      } else {
        n.pause_until = kForever;
      }
      return;
    case PersonPhase::at_office:
      if (now_ >= n.leave_at) {
        start_trip(id, n.schedule && n.schedule->evening ? TripGoal::evening : TripGoal::home);
      } else {
        office_wander(id);
      }
      return;
    case PersonPhase::at_evening:
      start_trip(id, TripGoal::home);
      return;
    case PersonPhase::commuting:
      continue_trip(id);
      return;
  }
}

void MobilityModel::on_arrival(NodeId id) {
  auto& n = nodes_[id];
  switch (n.kind) {
    case GroupKind::patrol:
    case GroupKind::bus: {
      const double d = draw_pause(id);
      pause(id, end_of_step_ + d);
      if (observer_) {
        observer_->on_pause(id, n.kind, PauseKind::stop, d);
        if (n.kind == GroupKind::bus) observer_->on_bus_stop(id, n.route, n.at);
      }
      return;
    }
    case GroupKind::person:
      break;
  }
  if (n.phase == PersonPhase::commuting) {
    ++n.trip_step;
    continue_trip(id);
    return;
  }
  if (n.phase == PersonPhase::at_office) {
    const double d = draw_pause(id);
    pause(id, std::min(end_of_step_ + d, n.leave_at));
    if (observer_) observer_->on_pause(id, n.kind, PauseKind::office, d);
    return;
  }
  pause(id, end_of_step_);
}

void MobilityModel::start_trip(NodeId id, TripGoal goal) {
  auto& n = nodes_[id];
  const auto& tags = map_->tags();
  const auto* prof = profile(id);
  WaypointId dest = prof->home;
  int leg = 2;
  if (goal == TripGoal::office) {
    dest = tags.offices[prof->office].entrance;
    leg = 0;
  } else if (goal == TripGoal::evening) {
    dest = n.schedule->evening->spot;
    leg = 1;
  }
  const int route = n.schedule ? n.schedule->transport[leg] : -1;

  n.trip.clear();
  n.trip_step = 0;
  n.goal = goal;
  n.phase = PersonPhase::commuting;

  bool by_bus = false;
  if (route >= 0) {
    const auto& stops = tags.bus_routes[route];
    WaypointId board = stops.front();
    WaypointId alight = stops.front();
    double to_board = kForever;
    double from_alight = kForever;
    for (WaypointId s : stops) {
      const double a = paths_.distance(n.at, s);
      if (a < to_board) {
        to_board = a;
        board = s;
      }
      const double b = paths_.distance(s, dest);
      if (b < from_alight) {
        from_alight = b;
        alight = s;
      }
    }
    if (board != alight && to_board + from_alight < paths_.distance(n.at, dest)) {
      n.trip.push_back({TripStep::Kind::walk, board, -1, 0});
      n.trip.push_back({TripStep::Kind::bus, alight, route, board});
      n.trip.push_back({TripStep::Kind::walk, dest, -1, 0});
      by_bus = true;
    }
  }
  if (!by_bus) n.trip.push_back({TripStep::Kind::walk, dest, -1, 0});
  continue_trip(id);
}

void MobilityModel::continue_trip(NodeId id) {
  auto& n = nodes_[id];
  while (n.trip_step < n.trip.size()) {
    const auto& s = n.trip[n.trip_step];
    if (s.kind == TripStep::Kind::walk) {
      if (s.target == n.at) {
        ++n.trip_step;
        continue;
      }
      begin_path(id, s.target);
      return;
    }
    n.route = s.route;
    n.mode = MotionMode::waiting_bus;
    return;
  }
  arrive(id);
}

void MobilityModel::arrive(NodeId id) {
  auto& n = nodes_[id];
  switch (n.goal) {
    case TripGoal::office: {
      n.phase = PersonPhase::at_office;
      n.leave_at = end_of_step_ + n.schedule->office_hours;
      const double d = draw_pause(id);
      pause(id, std::min(end_of_step_ + d, n.leave_at));
      if (observer_) observer_->on_pause(id, n.kind, PauseKind::office, d);
      return;
    }
    case TripGoal::evening: {
      n.phase = PersonPhase::at_evening;
      const double d = n.schedule->evening->duration;
      pause(id, end_of_step_ + d);
      if (observer_) observer_->on_pause(id, n.kind, PauseKind::evening, d);
      return;
    }
    case TripGoal::home:
      n.phase = PersonPhase::at_home;
      pause(id, n.schedule && !n.schedule_used ? n.schedule->work_start : kForever);
      return;
  }
}

void MobilityModel::office_wander(NodeId id) {
  auto& n = nodes_[id];
  const auto& office = map_->tags().offices[profile(id)->office];
  std::vector<WaypointId> points;
  if (office.entrance != n.at) points.push_back(office.entrance);
  for (WaypointId p : office.interior) {
    if (p != n.at) points.push_back(p);
  }
  if (points.empty()) {
    const double d = draw_pause(id);
    pause(id, std::min(end_of_step_ + d, n.leave_at));
    return;
  }
  begin_path(id, pick(points, rng_));
}

void MobilityModel::step_rider(NodeId id) {
  auto& n = nodes_[id];
  const auto& s = n.trip[n.trip_step];
  if (n.mode == MotionMode::waiting_bus) {
    for (NodeId bus : buses_by_route_[s.route]) {
      const auto& b = nodes_[bus];
      if (b.mode == MotionMode::paused && b.at == s.board) {
        n.mode = MotionMode::riding;
        n.riding_bus = bus;
        n.position = b.position;
        return;
      }
    }
    return;
  }
  const auto& b = nodes_[n.riding_bus];
  n.position = b.position;
  if (b.mode == MotionMode::paused && b.at == s.target) {
    n.at = s.target;
    n.position = map_->position(s.target);
    n.mode = MotionMode::paused;
    ++n.trip_step;
    continue_trip(id);
  }
}

}  // namespace oppnet
