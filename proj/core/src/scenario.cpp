#include "oppnet/scenario.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "oppnet/text.hpp"

namespace oppnet {

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::person: return "person";
    case GroupKind::bus: return "bus";
    case GroupKind::patrol: return "patrol";
  }
  return "?";
}

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::epidemic: return "epidemic";
    case ProtocolKind::prophet: return "prophet";
    case ProtocolKind::bubblerap: return "bubblerap";
  }
  return "?";
}

std::string_view to_string(TransferConcurrency c) {
  return c == TransferConcurrency::node ? "node" : "link";
}

std::optional<GroupKind> parse_group_kind(std::string_view name) {
  if (name == "person") return GroupKind::person;
  if (name == "bus") return GroupKind::bus;
  if (name == "patrol") return GroupKind::patrol;
  return std::nullopt;
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) {
  if (name == "epidemic") return ProtocolKind::epidemic;
  if (name == "prophet") return ProtocolKind::prophet;
  if (name == "bubblerap") return ProtocolKind::bubblerap;
  return std::nullopt;
}

GroupSpec default_group(GroupKind kind, std::string name, int size, int map_index) {
  GroupSpec g;
  g.name = std::move(name);
  g.kind = kind;
  g.size = size;
  g.map_index = map_index;
  switch (kind) {
    case GroupKind::person:
      g.speed = {0.8, 1.4};
      g.pause = {60.0, 4 * kSecondsPerHour};
      break;
    case GroupKind::bus:
      g.speed = {7.0, 10.0};
      g.pause = {10.0, 30.0};
      break;
    case GroupKind::patrol:
      g.speed = {7.0, 10.0};
      g.pause = {100.0, 300.0};
      break;
  }
  return g;
}

int ScenarioConfig::people_group_count() const {
  int n = 0;
  for (const auto& g : groups) {
    if (g.kind == GroupKind::person) n = std::max(n, g.map_index + 1);
  }
  return n;
}

int ScenarioConfig::bus_route_count() const {
  int n = 0;
  for (const auto& g : groups) {
    if (g.kind == GroupKind::bus) n = std::max(n, g.map_index + 1);
  }
  return n;
}

ConfigError::ConfigError(Kind kind, std::string message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      kind_(kind),
      line_(line) {}

ScenarioConfig default_uef_scenario() {
  ScenarioConfig c;
  c.groups.push_back(default_group(GroupKind::patrol, "patrol", 10, -1));
  for (int r = 0; r < 8; ++r) {
    c.groups.push_back(default_group(GroupKind::bus, "bus" + std::to_string(r + 1), 2, r));
  }
  for (int p = 0; p < 8; ++p) {
    c.groups.push_back(
        default_group(GroupKind::person, "people" + std::to_string(p + 1), p < 4 ? 15 : 16, p));
  }
  return c;
}

namespace {

[[noreturn]] void syntax_error(const std::string& msg, int line) {
  throw ConfigError(ConfigError::Kind::syntax, msg, line);
}

[[noreturn]] void invariant(const std::string& msg) {
  throw ConfigError(ConfigError::Kind::validation, msg);
}

struct KeySpec {
  std::string section;
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  // Returns false when the value does not parse.
  std::function<bool(ScenarioConfig&, std::string_view)> set;
};

template <class Ref>
KeySpec real_key(std::string section, std::string key, Ref ref) {
  return {std::move(section), std::move(key),
          [ref](const ScenarioConfig& c) {
            return text::format_double(ref(const_cast<ScenarioConfig&>(c)));
          },
          [ref](ScenarioConfig& c, std::string_view v) {
            auto d = text::parse_double(v);
            if (!d) return false;
            ref(c) = *d;
            return true;
          }};
}

template <class Ref>
KeySpec int_key(std::string section, std::string key, Ref ref) {
  return {std::move(section), std::move(key),
          [ref](const ScenarioConfig& c) {
            return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
          },
          [ref](ScenarioConfig& c, std::string_view v) {
            auto d = text::parse_int(v);
            if (!d) return false;
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(*d);
            return true;
          }};
}

template <class Ref>
KeySpec uint_key(std::string section, std::string key, Ref ref) {
  return {std::move(section), std::move(key),
          [ref](const ScenarioConfig& c) {
            return std::to_string(ref(const_cast<ScenarioConfig&>(c)));
          },
          [ref](ScenarioConfig& c, std::string_view v) {
            auto d = text::parse_uint(v);
            if (!d) return false;
            ref(c) = *d;
            return true;
          }};
}

template <class Ref>
KeySpec bool_key(std::string section, std::string key, Ref ref) {
  return {std::move(section), std::move(key),
          [ref](const ScenarioConfig& c) {
            return std::string(ref(const_cast<ScenarioConfig&>(c)) ? "true" : "false");
          },
          [ref](ScenarioConfig& c, std::string_view v) {
            v = text::trim(v);
            if (v != "true" && v != "false") return false;
            ref(c) = v == "true";
            return true;
          }};
}

#define OPPNET_REF(expr) [](ScenarioConfig& c) -> auto& { return c.expr; }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back({"scenario", "name", [](const ScenarioConfig& c) { return c.name; },
                 [](ScenarioConfig& c, std::string_view v) {
                   c.name = std::string(v);
                   return !c.name.empty();
                 }});
    t.push_back(int_key("scenario", "node_count", OPPNET_REF(node_count)));
    t.push_back(real_key("scenario", "sim_duration", OPPNET_REF(sim_duration)));
    t.push_back(real_key("scenario", "warmup", OPPNET_REF(warmup)));
    t.push_back(real_key("scenario", "tick", OPPNET_REF(tick)));
    t.push_back(int_key("scenario", "runs", OPPNET_REF(runs)));
    t.push_back(uint_key("scenario", "base_seed", OPPNET_REF(base_seed)));

    t.push_back(real_key("world", "width", OPPNET_REF(world.width)));
    t.push_back(real_key("world", "height", OPPNET_REF(world.height)));
    t.push_back(uint_key("world", "map_seed", OPPNET_REF(world.map_seed)));
    t.push_back({"world", "map_file", [](const ScenarioConfig& c) { return c.world.map_file; },
                 [](ScenarioConfig& c, std::string_view v) {
                   c.world.map_file = std::string(v);
                   return true;
                 }});
    t.push_back(real_key("world", "grid_spacing", OPPNET_REF(world.grid_spacing)));
    t.push_back(int_key("world", "homes_per_group", OPPNET_REF(world.homes_per_group)));
    t.push_back(int_key("world", "offices_per_group", OPPNET_REF(world.offices_per_group)));
    t.push_back(
        int_key("world", "meeting_spots_per_group", OPPNET_REF(world.meeting_spots_per_group)));
    t.push_back(int_key("world", "stops_per_route", OPPNET_REF(world.stops_per_route)));

    t.push_back(real_key("radio", "range", OPPNET_REF(radio.range)));
    t.push_back(real_key("radio", "bandwidth", OPPNET_REF(radio.bandwidth)));
    t.push_back(real_key("radio", "beacon_interval", OPPNET_REF(radio.beacon_interval)));
    t.push_back({"radio", "concurrency",
                 [](const ScenarioConfig& c) { return std::string(to_string(c.radio.concurrency)); },
                 [](ScenarioConfig& c, std::string_view v) {
                   v = text::trim(v);
                   if (v == "link") {
                     c.radio.concurrency = TransferConcurrency::link;
                   } else if (v == "node") {
                     c.radio.concurrency = TransferConcurrency::node;
                   } else {
                     return false;
                   }
                   return true;
                 }});
    t.push_back(bool_key("radio", "resend_in_contact", OPPNET_REF(radio.resend_in_contact)));

    t.push_back(int_key("traffic", "messages_per_day", OPPNET_REF(traffic.messages_per_day)));
    t.push_back(int_key("traffic", "pair_count", OPPNET_REF(traffic.pair_count)));
    t.push_back(uint_key("traffic", "pair_seed", OPPNET_REF(traffic.pair_seed)));
    t.push_back(int_key("traffic", "size_min", OPPNET_REF(traffic.size_min)));
    t.push_back(int_key("traffic", "size_max", OPPNET_REF(traffic.size_max)));
    t.push_back(real_key("traffic", "ttl", OPPNET_REF(traffic.ttl)));
    t.push_back(int_key("traffic", "buffer_capacity", OPPNET_REF(traffic.buffer_capacity)));

    t.push_back(real_key("workday", "office_hours", OPPNET_REF(workday.office_hours)));
    t.push_back(real_key("workday", "work_start_min", OPPNET_REF(workday.work_start.min)));
    t.push_back(real_key("workday", "work_start_max", OPPNET_REF(workday.work_start.max)));
    t.push_back(
        real_key("workday", "evening_probability", OPPNET_REF(workday.evening_probability)));
    t.push_back(real_key("workday", "evening_min", OPPNET_REF(workday.evening_duration.min)));
    t.push_back(real_key("workday", "evening_max", OPPNET_REF(workday.evening_duration.max)));
    t.push_back(int_key("workday", "evening_max_group", OPPNET_REF(workday.evening_max_group)));
    t.push_back(real_key("workday", "bus_probability", OPPNET_REF(workday.bus_probability)));

    t.push_back({"protocol", "name",
                 [](const ScenarioConfig& c) { return std::string(to_string(c.protocol)); },
                 [](ScenarioConfig& c, std::string_view v) {
                   auto p = parse_protocol(text::trim(v));
                   if (!p) return false;
                   c.protocol = *p;
                   return true;
                 }});

    t.push_back(real_key("prophet", "p_init", OPPNET_REF(prophet.p_init)));
    t.push_back(real_key("prophet", "beta", OPPNET_REF(prophet.beta)));
    t.push_back(real_key("prophet", "gamma", OPPNET_REF(prophet.gamma)));
    t.push_back(real_key("prophet", "aging_unit", OPPNET_REF(prophet.aging_unit)));

    t.push_back(
        real_key("bubblerap", "familiar_threshold", OPPNET_REF(bubble.familiar_threshold)));
    t.push_back(real_key("bubblerap", "merge_fraction", OPPNET_REF(bubble.merge_fraction)));
    t.push_back(real_key("bubblerap", "window_length", OPPNET_REF(bubble.window_length)));
    t.push_back(int_key("bubblerap", "window_count", OPPNET_REF(bubble.window_count)));
    return t;
  }();
  return table;
}

#undef OPPNET_REF

const KeySpec* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : key_table()) {
    if (k.section == section && k.key == key) return &k;
  }
  return nullptr;
}

/// Sets one field of a group; false when the key or value is bad.
bool set_group_field(GroupSpec& g, std::string_view key, std::string_view value) {
  auto real = [&](double& field) {
    auto d = text::parse_double(value);
    if (!d) return false;
    field = *d;
    return true;
  };
  auto integer = [&](int& field) {
    auto d = text::parse_int(value);
    if (!d) return false;
    field = static_cast<int>(*d);
    return true;
  };
  if (key == "kind") {
    auto k = parse_group_kind(text::trim(value));
    if (!k) return false;
    if (*k != g.kind) {
      GroupSpec fresh = default_group(*k, g.name, g.size, g.map_index);
      g = fresh;
    }
    return true;
  }
  if (key == "size") return integer(g.size);
  if (key == "speed_min") return real(g.speed.min);
  if (key == "speed_max") return real(g.speed.max);
  if (key == "pause_min") return real(g.pause.min);
  if (key == "pause_max") return real(g.pause.max);
  if (key == "map_index") return integer(g.map_index);
  return false;
}

struct PendingGroup {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<int> lines;
};

GroupSpec build_group(const PendingGroup& pending, int index_of_kind) {
  std::optional<GroupKind> kind;
  for (std::size_t i = 0; i < pending.fields.size(); ++i) {
    if (pending.fields[i].first == "kind") {
      kind = parse_group_kind(text::trim(pending.fields[i].second));
      if (!kind) syntax_error("unknown group kind '" + pending.fields[i].second + "'",
                              pending.lines[i]);
    }
  }
  if (!kind) syntax_error("group '" + pending.name + "' has no kind", pending.line);
  GroupSpec g = default_group(*kind, pending.name, 0,
                              *kind == GroupKind::patrol ? -1 : index_of_kind);
  for (std::size_t i = 0; i < pending.fields.size(); ++i) {
    const auto& [key, value] = pending.fields[i];
    if (key == "kind") continue;
    if (!set_group_field(g, key, value)) {
      syntax_error("bad group key or value '" + key + " = " + value + "'", pending.lines[i]);
    }
  }
  return g;
}

}  // namespace

ScenarioConfig load_config(std::string_view doc) {
  ScenarioConfig config = default_uef_scenario();
  std::string section;
  std::vector<PendingGroup> groups;
  bool in_group = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= doc.size()) {
    const auto eol = doc.find('\n', pos);
    const std::string_view raw =
        doc.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? doc.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') syntax_error("unterminated section header", line_no);
      const std::string_view inner = text::trim(line.substr(1, line.size() - 2));
      const auto words = text::split_ws(inner);
      if (words.empty()) syntax_error("empty section header", line_no);
      if (words[0] == "group") {
        if (words.size() != 2) syntax_error("expected [group NAME]", line_no);
        in_group = true;
        groups.push_back({std::string(words[1]), line_no, {}, {}});
        section = "group";
        continue;
      }
      if (words.size() != 1) syntax_error("unexpected text in section header", line_no);
      in_group = false;
      section = std::string(words[0]);
      bool known = false;
      for (const auto& k : key_table()) known = known || k.section == section;
      if (!known) syntax_error("unknown section [" + section + "]", line_no);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) syntax_error("expected 'key = value'", line_no);
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) syntax_error("missing key before '='", line_no);
    if (section.empty()) syntax_error("key '" + key + "' outside of any section", line_no);

    if (in_group) {
      groups.back().fields.emplace_back(key, value);
      groups.back().lines.push_back(line_no);
      continue;
    }
    const KeySpec* spec = find_key(section, key);
    if (!spec) syntax_error("unknown key '" + section + "." + key + "'", line_no);
    if (!spec->set(config, value)) {
      syntax_error("invalid value '" + value + "' for " + section + "." + key, line_no);
    }
  }

  if (!groups.empty()) {
    config.groups.clear();
    std::map<GroupKind, int> per_kind;
    for (const auto& pending : groups) {
      // map_index defaults to the group's position among groups of its kind
      GroupKind kind = GroupKind::person;
      for (const auto& [k, v] : pending.fields) {
        if (k == "kind") {
          if (auto parsed = parse_group_kind(text::trim(v))) kind = *parsed;
        }
      }
      config.groups.push_back(build_group(pending, per_kind[kind]++));
    }
  }

  validate(config);
  return config;
}

ScenarioConfig load_config_file(const std::string& path) {
  return load_config(text::read_file(path));
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(ConfigError::Kind::syntax,
                      "override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string path(text::trim(assignment.substr(0, eq)));
  const std::string value(text::trim(assignment.substr(eq + 1)));
  const auto parts = text::split(path, '.');

  if (parts.size() == 3 && parts[0] == "group") {
    auto it = std::find_if(config.groups.begin(), config.groups.end(),
                           [&](const GroupSpec& g) { return g.name == parts[1]; });
    if (it == config.groups.end()) {
      if (parts[2] != "kind") {
        throw ConfigError(ConfigError::Kind::syntax, "unknown group '" + parts[1] + "'");
      }
      auto kind = parse_group_kind(value);
      if (!kind) throw ConfigError(ConfigError::Kind::syntax, "unknown group kind '" + value + "'");
      int same = 0;
      for (const auto& g : config.groups) same += g.kind == *kind;
      config.groups.push_back(
          default_group(*kind, parts[1], 0, *kind == GroupKind::patrol ? -1 : same));
      return;
    }
    if (!set_group_field(*it, parts[2], value)) {
      throw ConfigError(ConfigError::Kind::syntax, "bad override '" + std::string(assignment) + "'");
    }
    return;
  }
  if (parts.size() != 2) {
    throw ConfigError(ConfigError::Kind::syntax,
                      "override key '" + path + "' must look like section.key");
  }
  const KeySpec* spec = find_key(parts[0], parts[1]);
  if (!spec) throw ConfigError(ConfigError::Kind::syntax, "unknown key '" + path + "'");
  if (!spec->set(config, value)) {
    if (parts[0] == "protocol") {
      throw ConfigError(ConfigError::Kind::validation,
                        "unknown protocol '" + value + "' (valid: " +
                            std::string(kProtocolNames) + ")");
    }
    throw ConfigError(ConfigError::Kind::syntax, "invalid value '" + value + "' for " + path);
  }
}

void validate(const ScenarioConfig& c) {
  auto num = [](double v) { return text::format_double(v); };

  if (c.node_count < 1) invariant("node_count must be >= 1");
  if (c.groups.empty()) invariant("at least one group is required");
  long long total = 0;
  std::set<std::string> names;
  for (const auto& g : c.groups) {
    const std::string where = "group '" + g.name + "': ";
    if (!names.insert(g.name).second) invariant(where + "duplicate group name");
    if (g.size < 1) invariant(where + "size must be >= 1");
    if (!(g.speed.min > 0.0) || g.speed.min > g.speed.max) {
      invariant(where + "speed range must satisfy 0 < min <= max");
    }
    if (g.pause.min < 0.0 || g.pause.min > g.pause.max) {
      invariant(where + "pause range must satisfy 0 <= min <= max");
    }
    if (g.kind != GroupKind::patrol && g.map_index < 0) invariant(where + "map_index must be >= 0");
    total += g.size;
  }
  if (total != c.node_count) {
    invariant("group-sum invariant violated: group sizes sum to " + std::to_string(total) +
              " but node_count is " + std::to_string(c.node_count));
  }

  const auto& w = c.world;
  if (!(w.width > 0.0) || !(w.height > 0.0)) invariant("world width and height must be > 0");
  if (!(w.grid_spacing > 0.0) || 2 * w.grid_spacing > std::min(w.width, w.height)) {
    invariant("world.grid_spacing must be > 0 and allow at least a 3x3 street grid");
  }
  if (w.homes_per_group < 1 || w.offices_per_group < 1 || w.meeting_spots_per_group < 1) {
    invariant("homes, offices and meeting spots per group must be >= 1");
  }
  if (w.stops_per_route < 4) invariant("world.stops_per_route must be >= 4");

  if (!(c.sim_duration > 0.0)) invariant("sim_duration must be > 0");
  if (c.warmup < 0.0) invariant("warmup must be >= 0");
  if (!(c.warmup < c.sim_duration)) {
    invariant("warmup (" + num(c.warmup) + ") must be < sim_duration (" + num(c.sim_duration) + ")");
  }
  if (!(c.tick > 0.0)) invariant("tick must be > 0");
  if (c.runs < 1) invariant("runs must be >= 1");

  if (!(c.radio.range > 0.0)) invariant("radio.range must be > 0");
  if (!(c.radio.bandwidth > 0.0)) invariant("radio.bandwidth must be > 0");
  if (c.radio.beacon_interval < c.tick) invariant("radio.beacon_interval must be >= tick");

  const auto& t = c.traffic;
  if (t.messages_per_day < 0) invariant("traffic.messages_per_day must be >= 0");
  if (t.pair_count < 0) invariant("traffic.pair_count must be >= 0");
  const long long max_pairs = static_cast<long long>(c.node_count) * (c.node_count - 1);
  if (t.pair_count > max_pairs) {
    invariant("traffic.pair_count exceeds n*(n-1) = " + std::to_string(max_pairs));
  }
  if (t.size_min < 1) invariant("traffic.size_min must be >= 1 byte");
  if (t.size_min > t.size_max) invariant("traffic.size_min must be <= traffic.size_max");
  if (!(t.ttl > 0.0)) invariant("traffic.ttl must be > 0");
  if (t.buffer_capacity < t.size_max) {
    invariant("traffic.buffer_capacity must be >= traffic.size_max");
  }

  const auto& d = c.workday;
  if (!(d.office_hours > 0.0)) invariant("workday.office_hours must be > 0");
  if (d.work_start.min < 0.0 || d.work_start.min > d.work_start.max ||
      d.work_start.max > kSecondsPerDay) {
    invariant("workday work start window must lie within one day with min <= max");
  }
  if (d.evening_probability < 0.0 || d.evening_probability > 1.0) {
    invariant("workday.evening_probability must be in [0, 1]");
  }
  if (d.evening_duration.min < 0.0 || d.evening_duration.min > d.evening_duration.max) {
    invariant("workday evening duration range must satisfy 0 <= min <= max");
  }
  if (d.evening_max_group < 1) invariant("workday.evening_max_group must be >= 1");
  if (d.bus_probability < 0.0 || d.bus_probability > 1.0) {
    invariant("workday.bus_probability must be in [0, 1]");
  }

  const auto& p = c.prophet;
  if (!(p.p_init > 0.0) || p.p_init > 1.0) invariant("prophet.p_init must be in (0, 1]");
  if (p.beta < 0.0 || p.beta > 1.0) invariant("prophet.beta must be in [0, 1]");
  if (!(p.gamma > 0.0) || p.gamma > 1.0) invariant("prophet.gamma must be in (0, 1]");
  if (!(p.aging_unit > 0.0)) invariant("prophet.aging_unit must be > 0");

  const auto& b = c.bubble;
  if (b.familiar_threshold < 0.0) invariant("bubblerap.familiar_threshold must be >= 0");
  if (b.merge_fraction < 0.0 || b.merge_fraction > 1.0) {
    invariant("bubblerap.merge_fraction must be in [0, 1]");
  }
  if (!(b.window_length > 0.0)) invariant("bubblerap.window_length must be > 0");
  if (b.window_count < 1) invariant("bubblerap.window_count must be >= 1");
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.key << " = " << k.get(c) << '\n';
  }
  for (const auto& g : c.groups) {
    out << "\n[group " << g.name << "]\n"
        << "kind = " << to_string(g.kind) << '\n'
        << "size = " << g.size << '\n'
        << "speed_min = " << text::format_double(g.speed.min) << '\n'
        << "speed_max = " << text::format_double(g.speed.max) << '\n'
        << "pause_min = " << text::format_double(g.pause.min) << '\n'
        << "pause_max = " << text::format_double(g.pause.max) << '\n'
        << "map_index = " << g.map_index << '\n';
  }
  return out.str();
}

}  // namespace oppnet
