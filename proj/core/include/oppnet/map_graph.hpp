#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oppnet/types.hpp"

namespace oppnet {

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Office {
  int group = 0;
  WaypointId entrance = 0;
  std::vector<WaypointId> interior;  // points people wander between, entrance excluded
};

/// Location tags indexed by people group / bus route.
struct MapTags {
  std::vector<std::vector<WaypointId>> homes;
  std::vector<Office> offices;
  std::vector<std::vector<WaypointId>> meeting_spots;
  std::vector<std::vector<WaypointId>> bus_routes;  // stops in cyclic visiting order

  /// Office indices belonging to a people group.
  std::vector<int> offices_of(int group) const;
};

/// Weighted undirected graph of waypoints.
class MapGraph {
 public:
  struct Neighbor {
    WaypointId to;
    double length;
  };
  struct Edge {
    WaypointId a;
    WaypointId b;
    double length;
  };

  WaypointId add_waypoint(Vec2 position);
  void add_edge(WaypointId a, WaypointId b, double length);
  /// Edge with length equal to the Euclidean distance.
  void add_straight_edge(WaypointId a, WaypointId b);

  std::size_t size() const { return positions_.size(); }
  const Vec2& position(WaypointId id) const { return positions_.at(id); }
  /// Sorted by neighbor id.
  std::span<const Neighbor> neighbors(WaypointId id) const { return adjacency_.at(id); }
  const std::vector<Edge>& edges() const { return edges_; }
  double edge_length(WaypointId a, WaypointId b) const;

  MapTags& tags() { return tags_; }
  const MapTags& tags() const { return tags_; }

  bool connected() const;
  /// Throws MapError on: disconnection, an edge shorter than its chord, a tag
  /// naming a missing waypoint, or a bus route with fewer than 4 stops.
  void validate() const;

  WaypointId nearest_waypoint(Vec2 p) const;

 private:
  std::vector<Vec2> positions_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<Edge> edges_;
  MapTags tags_;
};

struct MapLayout {
  int people_groups = 8;
  int bus_routes = 8;
  int homes_per_group = 8;
  int offices_per_group = 3;
  int meeting_spots_per_group = 3;
  int stops_per_route = 8;
  double grid_spacing = 150.0;
};

/// Synthetic street grid with tagged homes, offices, meeting spots and bus
/// routes. Deterministic in (width, height, seed, layout).
MapGraph generate_map(double width, double height, std::uint64_t seed, const MapLayout& layout = {});

/// Line format: `waypoint ID X Y`, `edge A B LENGTH`, `home GROUP WP`,
/// `office GROUP WP`, `office_point OFFICE WP`, `meeting GROUP WP`,
/// `stop ROUTE WP`. `#` starts a comment line.
std::string serialize_map(const MapGraph& map);
MapGraph parse_map(std::string_view text);

struct Path {
  std::vector<WaypointId> waypoints;  // from..to inclusive; empty when from == to
  double length = 0.0;
};

/// Shortest paths with deterministic tie-breaking: among minimum-length paths
/// the one with the lexicographically smallest waypoint sequence wins.
/// Distance trees are cached per target.
class PathFinder {
 public:
  explicit PathFinder(const MapGraph& map) : map_(&map) {}

  /// Throws MapError when `to` is unreachable.
  Path shortest_path(WaypointId from, WaypointId to);
  double distance(WaypointId from, WaypointId to);

 private:
  const std::vector<double>& tree(WaypointId target);

  const MapGraph* map_;
  std::unordered_map<WaypointId, std::vector<double>> trees_;
};

Path shortest_path(const MapGraph& map, WaypointId from, WaypointId to);

}  // namespace oppnet
