#include "oppnet/map_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "oppnet/rng.hpp"
#include "oppnet/text.hpp"

namespace oppnet {

std::vector<int> MapTags::offices_of(int group) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < offices.size(); ++i) {
    if (offices[i].group == group) out.push_back(static_cast<int>(i));
  }
  return out;
}

WaypointId MapGraph::add_waypoint(Vec2 position) {
  positions_.push_back(position);
  adjacency_.emplace_back();
  return static_cast<WaypointId>(positions_.size() - 1);
}

void MapGraph::add_edge(WaypointId a, WaypointId b, double length) {
  if (a >= size() || b >= size()) throw MapError("edge references a missing waypoint");
  if (a == b) throw MapError("self-loop edge at waypoint " + std::to_string(a));
  auto insert = [](std::vector<Neighbor>& list, WaypointId to, double len) {
    auto it = std::lower_bound(list.begin(), list.end(), to,
                               [](const Neighbor& n, WaypointId id) { return n.to < id; });
    if (it != list.end() && it->to == to) {
      throw MapError("duplicate edge to waypoint " + std::to_string(to));
    }
    list.insert(it, Neighbor{to, len});
  };
  insert(adjacency_[a], b, length);
  insert(adjacency_[b], a, length);
  edges_.push_back({std::min(a, b), std::max(a, b), length});
}

void MapGraph::add_straight_edge(WaypointId a, WaypointId b) {
  add_edge(a, b, oppnet::distance(position(a), position(b)));
}

double MapGraph::edge_length(WaypointId a, WaypointId b) const {
  for (const auto& n : adjacency_.at(a)) {
    if (n.to == b) return n.length;
  }
  throw MapError("no edge between " + std::to_string(a) + " and " + std::to_string(b));
}

bool MapGraph::connected() const {
  if (positions_.empty()) return true;
  std::vector<char> seen(size(), 0);
  std::vector<WaypointId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const WaypointId u = stack.back();
    stack.pop_back();
    for (const auto& n : adjacency_[u]) {
      if (!seen[n.to]) {
        seen[n.to] = 1;
        ++count;
        stack.push_back(n.to);
      }
    }
  }
  return count == size();
}

void MapGraph::validate() const {
  if (positions_.empty()) throw MapError("map has no waypoints");
  if (!connected()) throw MapError("map is not connected");
  for (const auto& e : edges_) {
    const double chord = oppnet::distance(positions_[e.a], positions_[e.b]);
    if (e.length < chord - 1e-6) {
      throw MapError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                     " is shorter than the distance between its endpoints");
    }
  }
  auto check = [&](WaypointId id, const char* what) {
    if (id >= size()) throw MapError(std::string(what) + " tag references missing waypoint " + std::to_string(id));
  };
  for (const auto& g : tags_.homes) for (auto id : g) check(id, "home");
  for (const auto& g : tags_.meeting_spots) for (auto id : g) check(id, "meeting");
  for (const auto& o : tags_.offices) {
    check(o.entrance, "office");
    for (auto id : o.interior) check(id, "office_point");
  }
  for (std::size_t r = 0; r < tags_.bus_routes.size(); ++r) {
    const auto& stops = tags_.bus_routes[r];
    for (auto id : stops) check(id, "stop");
    std::set<WaypointId> distinct(stops.begin(), stops.end());
    if (distinct.size() < 4 || distinct.size() != stops.size()) {
      throw MapError("bus route " + std::to_string(r) + " needs at least 4 distinct stops");
    }
  }
}

WaypointId MapGraph::nearest_waypoint(Vec2 p) const {
  WaypointId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (WaypointId i = 0; i < size(); ++i) {
    const double d = squared_distance(p, positions_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

double round_to(double v, double step) { return std::round(v / step) * step; }

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

WaypointId nearest_in(const MapGraph& map, Vec2 p, std::size_t street_count) {
  WaypointId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (WaypointId i = 0; i < street_count; ++i) {
    const double d = squared_distance(p, map.position(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

MapGraph generate_map(double width, double height, std::uint64_t seed, const MapLayout& layout) {
  Rng rng(splitmix64(seed ^ 0x6d6170ULL));
  MapGraph map;

  const double s = layout.grid_spacing;
  const int cols = std::max(3, static_cast<int>(std::floor(width / s)) + 1);
  const int rows = std::max(3, static_cast<int>(std::floor(height / s)) + 1);
  const double sx = width / (cols - 1);
  const double sy = height / (rows - 1);
  auto grid_id = [cols](int c, int r) { return static_cast<WaypointId>(r * cols + c); };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double x = c * sx;
      double y = r * sy;
      if (c > 0 && c < cols - 1) x += rng.uniform(-0.25, 0.25) * sx;
      if (r > 0 && r < rows - 1) y += rng.uniform(-0.25, 0.25) * sy;
      map.add_waypoint({round_to(x, 0.1), round_to(y, 0.1)});
    }
  }
  const std::size_t street_count = map.size();

  // Random spanning tree keeps the grid connected; most remaining streets are kept.
  std::vector<std::pair<WaypointId, WaypointId>> candidates;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) candidates.emplace_back(grid_id(c, r), grid_id(c + 1, r));
      if (r + 1 < rows) candidates.emplace_back(grid_id(c, r), grid_id(c, r + 1));
    }
  }
  for (std::size_t i = candidates.size(); i > 1; --i) {
    std::swap(candidates[i - 1], candidates[rng.uniform_int(0, i - 1)]);
  }
  DisjointSets sets(street_count);
  std::vector<char> in_tree(candidates.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    in_tree[i] = sets.unite(candidates[i].first, candidates[i].second) ? 1 : 0;
  }
  std::vector<std::pair<WaypointId, WaypointId>> chosen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (in_tree[i] || rng.bernoulli(0.8)) chosen.push_back(candidates[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  for (const auto& [a, b] : chosen) map.add_straight_edge(a, b);

  auto& tags = map.tags();
  const int groups = std::max(0, layout.people_groups);

  // Districts tile the world; each people group lives in one.
  int dcols = 1;
  while (dcols * dcols * height < groups * width && dcols < groups) ++dcols;
  const int drows = groups > 0 ? (groups + dcols - 1) / dcols : 1;
  auto district_bounds = [&](int g) {
    const int dc = g % dcols;
    const int dr = g / dcols;
    return std::array<double, 4>{dc * width / dcols, (dc + 1) * width / dcols,
                                 dr * height / drows, (dr + 1) * height / drows};
  };
  auto pick_street = [&](auto&& accept, std::set<WaypointId>& used) {
    std::vector<WaypointId> pool;
    for (WaypointId i = 0; i < street_count; ++i) {
      if (!used.count(i) && accept(map.position(i))) pool.push_back(i);
    }
    if (pool.empty()) {
      for (WaypointId i = 0; i < street_count; ++i) {
        if (!used.count(i)) pool.push_back(i);
      }
    }
    const WaypointId id = pool[rng.uniform_int(0, pool.size() - 1)];
    used.insert(id);
    return id;
  };

  std::set<WaypointId> used;
  tags.homes.assign(groups, {});
  for (int g = 0; g < groups; ++g) {
    const auto b = district_bounds(g);
    auto inside = [&](const Vec2& p) { return p.x >= b[0] && p.x < b[1] && p.y >= b[2] && p.y < b[3]; };
    for (int h = 0; h < layout.homes_per_group; ++h) tags.homes[g].push_back(pick_street(inside, used));
  }
  auto anywhere = [](const Vec2&) { return true; };
  auto margin = [&](const Vec2& p) {
    return p.x > s && p.x < width - s && p.y > s && p.y < height - s;
  };
  for (int g = 0; g < groups; ++g) {
    for (int o = 0; o < layout.offices_per_group; ++o) {
      Office office;
      office.group = g;
      office.entrance = pick_street(margin, used);
      const Vec2 e = map.position(office.entrance);
      constexpr double kHalf = 25.0;
      const Vec2 corners[4] = {{e.x - kHalf, e.y - kHalf}, {e.x + kHalf, e.y - kHalf},
                               {e.x + kHalf, e.y + kHalf}, {e.x - kHalf, e.y + kHalf}};
      for (const auto& p : corners) {
        const Vec2 clamped{std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
        const WaypointId id = map.add_waypoint(clamped);
        map.add_straight_edge(office.entrance, id);
        office.interior.push_back(id);
      }
      tags.offices.push_back(std::move(office));
    }
  }
  tags.meeting_spots.assign(groups, {});
  for (int g = 0; g < groups; ++g) {
    for (int m = 0; m < layout.meeting_spots_per_group; ++m) {
      tags.meeting_spots[g].push_back(pick_street(anywhere, used));
    }
  }

  // Bus routes: a loop of stops around a district centre, snapped to streets.
  for (int r = 0; r < layout.bus_routes; ++r) {
    Vec2 centre{rng.uniform(0.25, 0.75) * width, rng.uniform(0.25, 0.75) * height};
    if (groups > 0) {
      const auto b = district_bounds(r % groups);
      centre = {(b[0] + b[1]) / 2, (b[2] + b[3]) / 2};
    }
    std::vector<WaypointId> stops;
    double scale = 1.0;
    for (int attempt = 0; attempt < 16; ++attempt) {
      stops.clear();
      const double rx = rng.uniform(0.18, 0.28) * width * scale;
      const double ry = rng.uniform(0.18, 0.28) * height * scale;
      const double phase = rng.uniform(0.0, 2 * std::numbers::pi);
      for (int k = 0; k < layout.stops_per_route; ++k) {
        const double a = phase + 2 * std::numbers::pi * k / layout.stops_per_route;
        const Vec2 p{std::clamp(centre.x + rx * std::cos(a), s, width - s),
                     std::clamp(centre.y + ry * std::sin(a), s, height - s)};
        const WaypointId id = nearest_in(map, p, street_count);
        if (std::find(stops.begin(), stops.end(), id) == stops.end()) stops.push_back(id);
      }
      if (stops.size() >= 4) break;
      scale *= 1.25;
    }
    tags.bus_routes.push_back(std::move(stops));
  }

  map.validate();
  return map;
}

std::string serialize_map(const MapGraph& map) {
  std::ostringstream out;
  out << "# oppnet map: " << map.size() << " waypoints, " << map.edges().size() << " edges\n";
  for (WaypointId i = 0; i < map.size(); ++i) {
    const auto& p = map.position(i);
    out << "waypoint " << i << ' ' << text::format_double(p.x) << ' ' << text::format_double(p.y)
        << '\n';
  }
  for (const auto& e : map.edges()) {
    out << "edge " << e.a << ' ' << e.b << ' ' << text::format_double(e.length) << '\n';
  }
  const auto& tags = map.tags();
  for (std::size_t g = 0; g < tags.homes.size(); ++g) {
    for (auto id : tags.homes[g]) out << "home " << g << ' ' << id << '\n';
  }
  for (std::size_t o = 0; o < tags.offices.size(); ++o) {
    out << "office " << tags.offices[o].group << ' ' << tags.offices[o].entrance << '\n';
    for (auto id : tags.offices[o].interior) out << "office_point " << o << ' ' << id << '\n';
  }
  for (std::size_t g = 0; g < tags.meeting_spots.size(); ++g) {
    for (auto id : tags.meeting_spots[g]) out << "meeting " << g << ' ' << id << '\n';
  }
  for (std::size_t r = 0; r < tags.bus_routes.size(); ++r) {
    for (auto id : tags.bus_routes[r]) out << "stop " << r << ' ' << id << '\n';
  }
  return out.str();
}

MapGraph parse_map(std::string_view doc) {
  MapGraph map;
  auto& tags = map.tags();
  int line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw MapError("map line " + std::to_string(line_no) + ": " + msg);
  };
  auto index = [&](std::string_view s) {
    auto v = text::parse_uint(s);
    if (!v || *v > std::numeric_limits<std::uint32_t>::max()) fail("bad index '" + std::string(s) + "'");
    return static_cast<std::uint32_t>(*v);
  };
  auto real = [&](std::string_view s) {
    auto v = text::parse_double(s);
    if (!v) fail("bad number '" + std::string(s) + "'");
    return *v;
  };
  auto grow = [](auto& vec, std::size_t i) {
    if (vec.size() <= i) vec.resize(i + 1);
  };

  while (pos <= doc.size()) {
    const auto eol = doc.find('\n', pos);
    const std::string_view line =
        text::trim(doc.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
    pos = eol == std::string_view::npos ? doc.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split_ws(line);
    const auto& kind = f[0];
    auto arity = [&](std::size_t n) {
      if (f.size() != n + 1) fail("'" + std::string(kind) + "' expects " + std::to_string(n) + " fields");
    };
    if (kind == "waypoint") {
      arity(3);
      if (index(f[1]) != map.size()) fail("waypoint ids must be dense and in order");
      map.add_waypoint({real(f[2]), real(f[3])});
    } else if (kind == "edge") {
      arity(3);
      try {
        map.add_edge(index(f[1]), index(f[2]), real(f[3]));
      } catch (const MapError& e) {
        fail(e.what());
      }
    } else if (kind == "home") {
      arity(2);
      const auto g = index(f[1]);
      grow(tags.homes, g);
      tags.homes[g].push_back(index(f[2]));
    } else if (kind == "office") {
      arity(2);
      Office o;
      o.group = static_cast<int>(index(f[1]));
      o.entrance = index(f[2]);
      tags.offices.push_back(o);
    } else if (kind == "office_point") {
      arity(2);
      const auto o = index(f[1]);
      if (o >= tags.offices.size()) fail("office_point before its office");
      tags.offices[o].interior.push_back(index(f[2]));
    } else if (kind == "meeting") {
      arity(2);
      const auto g = index(f[1]);
      grow(tags.meeting_spots, g);
      tags.meeting_spots[g].push_back(index(f[2]));
    } else if (kind == "stop") {
      arity(2);
      const auto r = index(f[1]);
      grow(tags.bus_routes, r);
      tags.bus_routes[r].push_back(index(f[2]));
    } else {
      fail("unknown record '" + std::string(kind) + "'");
    }
  }
  map.validate();
  return map;
}

const std::vector<double>& PathFinder::tree(WaypointId target) {
  auto it = trees_.find(target);
  if (it != trees_.end()) return it->second;

  const auto n = map_->size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, WaypointId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[target] = 0.0;
  queue.emplace(0.0, target);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : map_->neighbors(u)) {
      const double nd = d + nb.length;
      if (nd < dist[nb.to]) {
        dist[nb.to] = nd;
        queue.emplace(nd, nb.to);
      }
    }
  }
  return trees_.emplace(target, std::move(dist)).first->second;
}

double PathFinder::distance(WaypointId from, WaypointId to) {
  if (from >= map_->size() || to >= map_->size()) throw MapError("path endpoint does not exist");
  return tree(to)[from];
}

Path PathFinder::shortest_path(WaypointId from, WaypointId to) {
  if (from >= map_->size() || to >= map_->size()) throw MapError("path endpoint does not exist");
  Path path;
  if (from == to) return path;
  const auto& dist = tree(to);
  if (!std::isfinite(dist[from])) {
    throw MapError("waypoint " + std::to_string(to) + " unreachable from " + std::to_string(from));
  }
  // Walking the distance tree and always taking the smallest-id neighbour
  // that stays on a shortest path yields the lexicographically smallest one.
  WaypointId u = from;
  path.waypoints.push_back(u);
  while (u != to) {
    const double tol = 1e-9 * std::max(1.0, dist[u]);
    WaypointId next = u;
    double step = 0.0;
    for (const auto& nb : map_->neighbors(u)) {
      if (nb.length > 0.0 && std::abs(nb.length + dist[nb.to] - dist[u]) <= tol) {
        next = nb.to;
        step = nb.length;
        break;
      }
    }
    if (next == u) throw MapError("shortest path reconstruction failed");
    path.length += step;
    u = next;
    path.waypoints.push_back(u);
  }
  return path;
}

Path shortest_path(const MapGraph& map, WaypointId from, WaypointId to) {
  PathFinder finder(map);
  return finder.shortest_path(from, to);
}

}  // namespace oppnet
