#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oppnet/map_graph.hpp"
#include "oppnet/mobility.hpp"
#include "oppnet/network.hpp"
#include "oppnet/scenario.hpp"
#include "oppnet/traffic.hpp"

namespace oppnet {

struct MessageRecord {
  MessageId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  std::int64_t size = 0;
  double created_at = 0.0;
  bool measured = false;  // created after warmup
  bool delivered = false;
  double delivered_at = 0.0;  // end of the tick in which the last byte arrived
  int transfers = 0;          // completed transfers of this message

  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

/// Counters over measured messages only (created at or after warmup end).
struct RunCounters {
  std::int64_t created = 0;
  std::int64_t delivered = 0;
  std::int64_t forwardings = 0;         // completed transfers, delivery hops included
  std::int64_t delivery_transfers = 0;  // transfers that produced a first delivery
  std::int64_t aborted = 0;
  std::int64_t evictions = 0;
  std::int64_t expirations = 0;
  std::int64_t rejected = 0;  // completed transfers the receiver did not keep

  friend bool operator==(const RunCounters&, const RunCounters&) = default;
};

struct InvariantReport {
  bool checked = false;
  std::int64_t ticks_checked = 0;
  std::int64_t violations = 0;
  std::string first_violation;

  friend bool operator==(const InvariantReport&, const InvariantReport&) = default;
};

struct RunResult {
  std::uint64_t seed = 0;
  ProtocolKind protocol = ProtocolKind::epidemic;
  double ttl = 0.0;
  RunCounters counters;
  std::vector<MessageRecord> messages;
  InvariantReport invariants;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct RunOptions {
  /// Replayed workload; generated from the run seed when null.
  const TrafficSchedule* schedule = nullptr;
  /// Shared map; built from the config when null.
  const MapGraph* map = nullptr;
  /// Scripted contacts replace mobility and radio detection when set.
  const std::vector<ContactEvent>* scripted_contacts = nullptr;
  /// Receives every closed contact.
  std::vector<ContactEvent>* contact_trace = nullptr;
  /// Checks copy conservation, causality and link budgets every tick.
  bool check_invariants = false;
  MobilityObserver* mobility_observer = nullptr;
  /// Called about once per simulated hour with (now, end).
  std::function<void(double, double)> progress;
};

/// Loads `world.map_file` when set, otherwise generates the synthetic map.
MapGraph build_map(const ScenarioConfig& config);

/// The pair set shared by every run of an experiment.
std::vector<SourceDestination> experiment_pairs(const ScenarioConfig& config);
/// The workload of one run, identical for every protocol.
TrafficSchedule run_schedule(const ScenarioConfig& config, std::uint64_t seed);

/// One simulation of `config` with `seed`. Deterministic in (config, seed,
/// schedule). Throws ConfigError / MapError before simulating on bad input.
RunResult run(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options = {});

/// The contacts a run of (config, seed) sees, without routing or traffic.
/// Same mobility stream as run().
std::vector<ContactEvent> record_contacts(const ScenarioConfig& config, std::uint64_t seed,
                                          const MapGraph* map = nullptr);

struct ExperimentOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  const MapGraph* map = nullptr;
  /// Per-run replayed schedules, indexed by run; empty to generate.
  const std::vector<TrafficSchedule>* schedules = nullptr;
  std::function<void(std::uint64_t seed, const RunResult&)> on_run_done;
};

/// Runs seeds base_seed .. base_seed + runs - 1, possibly concurrently.
/// Results are ordered by seed regardless of execution order.
std::vector<RunResult> run_experiment(const ScenarioConfig& config, std::uint64_t base_seed, int runs,
                                      const ExperimentOptions& options = {});

/// Line-oriented record: counters, then one row per message.
std::string serialize_run_result(const RunResult& result);

}  // namespace oppnet
