#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oppnet/scenario.hpp"
#include "oppnet/types.hpp"

namespace oppnet {

struct SourceDestination {
  NodeId source = 0;
  NodeId destination = 0;

  friend bool operator==(const SourceDestination&, const SourceDestination&) = default;
  friend auto operator<=>(const SourceDestination&, const SourceDestination&) = default;
};

struct TrafficEntry {
  double time = 0.0;
  NodeId source = 0;
  NodeId destination = 0;
  std::int64_t size = 0;
  MessageId id = 0;

  friend bool operator==(const TrafficEntry&, const TrafficEntry&) = default;
};

/// Message creations ordered by time; ids are 0..n-1 in order.
struct TrafficSchedule {
  std::vector<TrafficEntry> entries;

  friend bool operator==(const TrafficSchedule&, const TrafficSchedule&) = default;
};

/// Distinct ordered pairs with source != destination, sorted. Throws
/// std::invalid_argument when pair_count exceeds n * (n - 1).
std::vector<SourceDestination> build_pairs(std::size_t node_count, int pair_count,
                                           std::uint64_t seed);

/// Poisson arrivals at messages_per_day over [0, duration); each arrival
/// picks a pair uniformly and a size uniformly in [size_min, size_max].
TrafficSchedule build_schedule(std::span<const SourceDestination> pairs,
                               const TrafficConfig& config, double duration, std::uint64_t seed);

/// Plain-text table `time source destination size id` with a header line.
std::string serialize_schedule(const TrafficSchedule& schedule);
/// Throws std::runtime_error naming the offending line.
TrafficSchedule parse_schedule(std::string_view text);

}  // namespace oppnet
