#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oppnet/types.hpp"

namespace oppnet {

enum class GroupKind { person, bus, patrol };
enum class ProtocolKind { epidemic, prophet, bubblerap };

std::string_view to_string(GroupKind kind);
std::string_view to_string(ProtocolKind kind);
std::optional<GroupKind> parse_group_kind(std::string_view name);
/// Accepts "epidemic", "prophet" and "bubblerap".
std::optional<ProtocolKind> parse_protocol(std::string_view name);
inline constexpr std::string_view kProtocolNames = "epidemic, prophet, bubblerap";

struct Range {
  double min = 0.0;
  double max = 0.0;

  bool contains(double v) const { return v >= min && v <= max; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// One homogeneous group of nodes sharing a movement model.
struct GroupSpec {
  std::string name;
  GroupKind kind = GroupKind::person;
  int size = 0;
  Range speed;  // m/s, drawn once per leg
  Range pause;  // s; for people this is the in-office pause
  // person: home/office/meeting-spot tag group; bus: route index; patrol: unused
  int map_index = -1;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

GroupSpec default_group(GroupKind kind, std::string name, int size, int map_index);

/// link: every contact carries its own transfers. node: a node takes part
/// in at most one transfer at a time across all its contacts.
enum class TransferConcurrency { link, node };

std::string_view to_string(TransferConcurrency c);

struct RadioConfig {
  double range = 100.0;            // m
  double bandwidth = 11e6;         // bit/s
  double beacon_interval = 1.0;    // s
  TransferConcurrency concurrency = TransferConcurrency::node;
  bool resend_in_contact = true;   // re-offer a message already sent over this contact

  friend bool operator==(const RadioConfig&, const RadioConfig&) = default;
};

struct TrafficConfig {
  int messages_per_day = 500;
  int pair_count = 50;
  std::uint64_t pair_seed = 1;
  std::int64_t size_min = 1000;            // bytes
  std::int64_t size_max = 100000;          // bytes
  double ttl = 24 * kSecondsPerHour;       // s
  std::int64_t buffer_capacity = 2000000;  // bytes

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

/// Parameters of the home/office/evening day cycle followed by people.
struct WorkdayConfig {
  double office_hours = 8 * kSecondsPerHour;
  Range work_start{7 * kSecondsPerHour, 9 * kSecondsPerHour};  // seconds after midnight
  double evening_probability = 0.5;
  Range evening_duration{1 * kSecondsPerHour, 2 * kSecondsPerHour};
  int evening_max_group = 3;
  double bus_probability = 0.5;

  friend bool operator==(const WorkdayConfig&, const WorkdayConfig&) = default;
};

struct WorldConfig {
  double width = 4500.0;   // m
  double height = 3400.0;  // m
  std::uint64_t map_seed = 1;
  std::string map_file;  // empty: generate
  double grid_spacing = 150.0;
  int homes_per_group = 8;
  int offices_per_group = 3;
  int meeting_spots_per_group = 3;
  int stops_per_route = 8;

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

struct ProphetParams {
  double p_init = 0.75;
  double beta = 0.25;
  double gamma = 0.98;
  double aging_unit = 30.0;  // s of simulated time per aging step

  friend bool operator==(const ProphetParams&, const ProphetParams&) = default;
};

struct BubbleParams {
  double familiar_threshold = 2 * kSecondsPerHour;  // cumulative contact, s
  double merge_fraction = 0.5;
  double window_length = 6 * kSecondsPerHour;
  int window_count = 2;

  friend bool operator==(const BubbleParams&, const BubbleParams&) = default;
};

struct ScenarioConfig {
  std::string name = "uef";
  int node_count = 150;
  std::vector<GroupSpec> groups;
  WorldConfig world;
  double sim_duration = 12 * kSecondsPerDay;
  double warmup = 2 * kSecondsPerDay;
  double tick = 1.0;
  int runs = 10;
  std::uint64_t base_seed = 1;
  RadioConfig radio;
  TrafficConfig traffic;
  WorkdayConfig workday;
  ProtocolKind protocol = ProtocolKind::prophet;
  ProphetParams prophet;
  BubbleParams bubble;

  int people_group_count() const;
  int bus_route_count() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { syntax, validation };

  ConfigError(Kind kind, std::string message, int line = 0);

  Kind kind() const { return kind_; }
  /// 1-based line of a syntax error; 0 when not tied to a line.
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// The heterogeneous 150-node scenario: one patrol group of 10, eight bus
/// groups of 2 and eight people groups (4 x 15 + 4 x 16).
ScenarioConfig default_uef_scenario();

/// Parses a `[section]` / `key = value` document on top of the defaults and
/// validates the result. Throws ConfigError.
ScenarioConfig load_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);

/// Applies one `section.key=value` override (the CLI's --set form).
void apply_override(ScenarioConfig& config, std::string_view assignment);

/// Throws ConfigError(validation) naming the first violated invariant.
void validate(const ScenarioConfig& config);

/// Writes every key, so load_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace oppnet
