#include "oppnet/metrics.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "oppnet/text.hpp"

namespace oppnet {

double delivery_rate(const RunResult& run) {
  const auto& c = run.counters;
  return c.created == 0 ? 0.0 : static_cast<double>(c.delivered) / static_cast<double>(c.created);
}

std::optional<double> delivery_cost(const RunResult& run) {
  const auto& c = run.counters;
  if (c.delivered == 0) return std::nullopt;
  return static_cast<double>(c.forwardings - c.delivery_transfers) /
         static_cast<double>(c.delivered);
}

std::optional<double> mean_delay(const RunResult& run) {
  double sum = 0.0;
  std::int64_t count = 0;
  for (const auto& m : run.messages) {
    if (!m.measured || !m.delivered) continue;
    sum += m.delivered_at - m.created_at;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

double t_quantile_95(int df) {
  static constexpr std::array<double, 30> table = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return 0.0;
  if (df <= 30) return table[static_cast<std::size_t>(df - 1)];
  return 1.960;
}

ConfidenceInterval confidence_interval(std::span<const double> values) {
  ConfidenceInterval ci;
  ci.samples = values.size();
  if (values.empty()) return ci;
  const double n = static_cast<double>(values.size());
  ci.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return ci;
  double ss = 0.0;
  for (double v : values) ss += (v - ci.mean) * (v - ci.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  ci.half_width = t_quantile_95(static_cast<int>(values.size()) - 1) * sd / std::sqrt(n);
  return ci;
}

RunMetrics run_metrics(const RunResult& run) {
  RunMetrics m;
  m.seed = run.seed;
  m.created = run.counters.created;
  m.delivered = run.counters.delivered;
  m.forwardings = run.counters.forwardings;
  m.delivery_rate = delivery_rate(run);
  m.cost = delivery_cost(run);
  m.mean_delay = mean_delay(run);
  return m;
}

CellMetrics aggregate(std::string experiment, ProtocolKind protocol, double ttl_hours,
                      std::span<const RunResult> runs) {
  CellMetrics cell;
  cell.experiment = std::move(experiment);
  cell.protocol = protocol;
  cell.ttl_hours = ttl_hours;
  std::vector<double> rates, costs, delays;
  for (const auto& r : runs) {
    auto m = run_metrics(r);
    rates.push_back(m.delivery_rate);
    if (m.cost) costs.push_back(*m.cost);
    if (m.mean_delay) delays.push_back(*m.mean_delay);
    cell.created += static_cast<double>(m.created);
    cell.delivered += static_cast<double>(m.delivered);
    cell.forwardings += static_cast<double>(m.forwardings);
    cell.runs.push_back(std::move(m));
  }
  if (!runs.empty()) {
    const double n = static_cast<double>(runs.size());
    cell.created /= n;
    cell.delivered /= n;
    cell.forwardings /= n;
  }
  cell.delivery = confidence_interval(rates);
  if (!costs.empty()) cell.cost = confidence_interval(costs);
  if (!delays.empty()) cell.delay = confidence_interval(delays);
  return cell;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? text::format_double(*v) : ""; }

}  // namespace

std::string write_results_csv(std::span<const CellMetrics> cells) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const auto& cell : cells) {
    for (const auto& r : cell.runs) {
      out << cell.experiment << ',' << to_string(cell.protocol) << ','
          << text::format_double(cell.ttl_hours) << ',' << r.seed << ',' << r.created << ','
          << r.delivered << ',' << r.forwardings << ',' << text::format_double(r.delivery_rate)
          << ',' << opt(r.cost) << ',' << opt(r.mean_delay) << ",,,\n";
    }
  }
  for (const auto& cell : cells) {
    std::optional<double> cost, delay, ci_cost, ci_delay;
    if (cell.cost) {
      cost = cell.cost->mean;
      ci_cost = cell.cost->half_width;
    }
    if (cell.delay) {
      delay = cell.delay->mean;
      ci_delay = cell.delay->half_width;
    }
    out << cell.experiment << ',' << to_string(cell.protocol) << ','
        << text::format_double(cell.ttl_hours) << ",aggregate,"
        << text::format_double(cell.created) << ',' << text::format_double(cell.delivered) << ','
        << text::format_double(cell.forwardings) << ','
        << text::format_double(cell.delivery.mean) << ',' << opt(cost) << ',' << opt(delay)
        << ',' << opt(cell.delivery.half_width) << ',' << opt(ci_cost) << ','
        << opt(ci_delay) << '\n';
  }
  return out.str();
}

}  // namespace oppnet
