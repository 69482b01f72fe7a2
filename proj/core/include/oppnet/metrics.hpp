#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oppnet/engine.hpp"

namespace oppnet {

/// delivered / created; 0 when nothing was created.
double delivery_rate(const RunResult& run);
/// Relay transfers per delivered message: (forwardings - first-delivery
/// transfers) / delivered. Undefined when nothing was delivered.
std::optional<double> delivery_cost(const RunResult& run);
/// Mean creation-to-delivery delay of delivered measured messages.
std::optional<double> mean_delay(const RunResult& run);

/// Two-sided 95% Student t quantile; 1.960 beyond 30 degrees of freedom.
double t_quantile_95(int degrees_of_freedom);

struct ConfidenceInterval {
  double mean = 0.0;
  std::optional<double> half_width;  // absent for fewer than two samples
  std::size_t samples = 0;
};

/// Mean +- t * s / sqrt(n) with the sample standard deviation.
ConfidenceInterval confidence_interval(std::span<const double> values);

struct RunMetrics {
  std::uint64_t seed = 0;
  std::int64_t created = 0;
  std::int64_t delivered = 0;
  std::int64_t forwardings = 0;
  double delivery_rate = 0.0;
  std::optional<double> cost;
  std::optional<double> mean_delay;
};

RunMetrics run_metrics(const RunResult& run);

struct CellMetrics {
  std::string experiment;
  ProtocolKind protocol = ProtocolKind::epidemic;
  double ttl_hours = 0.0;
  std::vector<RunMetrics> runs;
  ConfidenceInterval delivery;
  std::optional<ConfidenceInterval> cost;   // over runs with a defined cost
  std::optional<ConfidenceInterval> delay;  // over runs with a defined delay
  double created = 0.0;                     // means over runs
  double delivered = 0.0;
  double forwardings = 0.0;
};

CellMetrics aggregate(std::string experiment, ProtocolKind protocol, double ttl_hours,
                      std::span<const RunResult> runs);

/// Column order of results.csv.
inline constexpr const char* kResultsHeader =
    "experiment,protocol,ttl_hours,seed,created,delivered,forwardings,delivery_rate,cost,"
    "mean_delay_s,ci_delivery,ci_cost,ci_delay";

/// Per-run rows for every cell, then one `aggregate` row per cell. Undefined
/// values are empty fields.
std::string write_results_csv(std::span<const CellMetrics> cells);

}  // namespace oppnet
