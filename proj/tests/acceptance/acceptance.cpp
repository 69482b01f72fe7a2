// Acceptance suite: one PASS/FAIL line per criterion.
//
//   oppnet_acceptance [--runs N] [--csv PATH] [--report PATH] [--only LIST]
//
// Criteria 1-6 are properties and decide the exit status. Criteria 7-12
// compare protocols over N seeds (default 10) of the default scenario and
// are reported with their measured values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "oppnet/engine.hpp"
#include "oppnet/metrics.hpp"
#include "oppnet/prophet.hpp"
#include "oppnet/rng.hpp"
#include "oppnet/text.hpp"
#include "support/scripted_trace.hpp"

namespace oppnet {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string g_log;

// Prints and keeps a copy for the report file.
template <class... Args>
void say(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  std::fputs(buf, stdout);
  std::fflush(stdout);
  g_log += buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Report {
  int property_failures = 0;
  int qualitative_passes = 0;
  int qualitative_total = 0;

  void line(int id, bool property, const Outcome& o) {
    say("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    if (property) {
      property_failures += o.pass ? 0 : 1;
    } else {
      ++qualitative_total;
      qualitative_passes += o.pass ? 1 : 0;
    }
  }
};

std::string fmt(double v, int digits = 4) { return text::format_fixed(v, digits); }

Outcome epidemic_oracle() {
  const auto t0 = Clock::now();
  Rng rng(1);
  int cases = 0;
  int mismatches = 0;
  int deliveries = 0;
  for (; cases < 25; ++cases) {
    const auto c = test_support::random_case(rng, 8, 15);
    const auto expected = test_support::epidemic_reachable(c);
    const auto got = test_support::delivered_set(test_support::run_scripted(c, ProtocolKind::epidemic));
    deliveries += static_cast<int>(expected.size());
    if (got != expected) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 1.0,
          std::to_string(cases) + " traces, " + std::to_string(deliveries) +
              " oracle deliveries, " + std::to_string(mismatches) + " mismatches, " +
              fmt(elapsed, 3) + " s"};
}

Outcome prophet_formulas() {
  const auto t0 = Clock::now();
  constexpr double tol = 1e-12;
  double g10 = 1.0;
  for (int i = 0; i < 10; ++i) g10 *= 0.98;
  const bool examples =
      std::abs(prophet_encounter(0.0, 0.75) - 0.75) < tol &&
      std::abs(prophet_encounter(0.75, 0.75) - 0.9375) < tol &&
      std::abs(prophet_encounter(1.0, 0.75) - 1.0) < tol &&
      std::abs(prophet_age(0.5, 1, 0.98) - 0.49) < tol &&
      std::abs(prophet_age(1.0, 10, 0.98) - g10) < tol &&
      std::abs(prophet_transitive(0.0, 1.0, 1.0, 0.25) - 0.25) < tol &&
      std::abs(prophet_transitive(0.7, 0.0, 0.3, 0.25) - 0.7) < tol &&
      std::abs(prophet_transitive(0.5, 0.8, 0.5, 0.25) - 0.55) < tol;

  Rng rng(2);
  long long out_of_range = 0;
  constexpr int sequences = 1000000;
  for (int s = 0; s < sequences; ++s) {
    double p = rng.uniform01();
    const int len = 1 + static_cast<int>(rng.uniform_int(0, 7));
    for (int k = 0; k < len; ++k) {
      switch (rng.uniform_int(0, 2)) {
        case 0: p = prophet_encounter(p, 0.75); break;
        case 1: p = prophet_age(p, static_cast<double>(rng.uniform_int(0, 1000)), 0.98); break;
        default: p = prophet_transitive(p, rng.uniform01(), rng.uniform01(), 0.25); break;
      }
      if (!(p >= 0.0 && p <= 1.0)) ++out_of_range;
    }
  }
  const double elapsed = seconds_since(t0);
  return {examples && out_of_range == 0 && elapsed < 10.0,
          std::string("examples ") + (examples ? "ok" : "WRONG") + ", " +
              std::to_string(sequences) + " sequences, " + std::to_string(out_of_range) +
              " out of range, " + fmt(elapsed, 2) + " s"};
}

Outcome determinism(const ScenarioConfig& base) {
  const auto t0 = Clock::now();
  const std::string a = serialize_run_result(run(base, 7));
  const std::string b = serialize_run_result(run(base, 7));
  const double elapsed = seconds_since(t0);
  return {a == b && elapsed <= 600.0,
          std::string(a == b ? "identical" : "DIFFERENT") + " (" + std::to_string(a.size()) +
              " bytes), 2 runs in " + fmt(elapsed, 1) + " s"};
}

Outcome invariants(const ScenarioConfig& base) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (ProtocolKind p : {ProtocolKind::epidemic, ProtocolKind::prophet, ProtocolKind::bubblerap}) {
    ScenarioConfig c = base;
    c.protocol = p;
    c.sim_duration = kSecondsPerDay;
    c.warmup = 0.0;
    RunOptions o;
    o.check_invariants = true;
    const auto r = run(c, 1, o);
    const bool good = r.invariants.violations == 0 &&
                      r.invariants.ticks_checked == static_cast<std::int64_t>(kSecondsPerDay / c.tick);
    ok = ok && good;
    detail += std::string(to_string(p)) + " " + std::to_string(r.invariants.ticks_checked) +
              " ticks/" + std::to_string(r.invariants.violations) + " violations";
    if (!r.invariants.first_violation.empty()) detail += " (" + r.invariants.first_violation + ")";
    detail += "; ";
  }
  return {ok, detail + fmt(seconds_since(t0), 1) + " s"};
}

Outcome confidence() {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i);
  const auto ci = confidence_interval(v);
  const double hw = ci.half_width.value_or(-1.0);
  return {std::abs(hw - 2.166) <= 0.001, "half-width " + fmt(hw, 4)};
}

Outcome transfer_arithmetic() {
  bool ok = true;
  std::string detail;
  for (double tick : {1.0, 0.1, 0.05, 0.01, 0.001}) {
    test_support::ScriptedCase c;
    c.nodes = 2;
    c.slots = 1;
    c.slot = 2.0;
    c.ttl = 2.0;
    c.contacts = {{NodePair(0, 1), 0.0, 2.0, 11e6}};
    c.schedule.entries = {{0.0, 0, 1, 100000, 0}};
    ScenarioConfig config = test_support::scripted_config(c, ProtocolKind::epidemic);
    config.tick = tick;
    config.radio.beacon_interval = tick;
    RunOptions o;
    o.schedule = &c.schedule;
    o.scripted_contacts = &c.contacts;
    const auto r = run(config, 1, o);

    // Per-tick summation of the link budget.
    double sent = 0.0;
    long long ticks = 0;
    while (sent < 100000.0) {
      sent += 11e6 * tick / 8.0;
      ++ticks;
    }
    const auto closed_form = static_cast<long long>(std::ceil(100000.0 * 8.0 / 11e6 / tick - 1e-12));
    const double got = r.messages[0].delivered ? r.messages[0].delivered_at / tick : -1.0;
    const bool good = ticks == closed_form && std::abs(got - static_cast<double>(ticks)) < 1e-6;
    ok = ok && good;
    detail += "tick " + text::format_double(tick) + ": " + fmt(got, 0) + "/" +
              std::to_string(closed_form) + "; ";
  }
  return {ok, detail};
}

struct ProtocolSummary {
  double delivery = 0.0;
  double delivered = 0.0;
  double forwardings = 0.0;
  double delay = 0.0;
};

ProtocolSummary summarize(const CellMetrics& cell) {
  ProtocolSummary s;
  s.delivery = cell.delivery.mean;
  s.delivered = cell.delivered;
  s.forwardings = cell.forwardings;
  s.delay = cell.delay ? cell.delay->mean : 0.0;
  return s;
}

int run_suite(int runs, const std::string& csv_path, const std::string& report_path,
              const std::set<int>& only) {
  auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };
  Report report;
  const ScenarioConfig base = default_uef_scenario();

  if (wanted(1)) report.line(1, true, epidemic_oracle());
  if (wanted(2)) report.line(2, true, prophet_formulas());
  if (wanted(3)) report.line(3, true, determinism(base));
  if (wanted(4)) report.line(4, true, invariants(base));
  if (wanted(5)) report.line(5, true, confidence());
  if (wanted(6)) report.line(6, true, transfer_arithmetic());

  const bool comparison = wanted(7) || wanted(8) || wanted(9) || wanted(10) || wanted(11) ||
                          wanted(12);
  if (comparison) {
    const auto t0 = Clock::now();
    const MapGraph map = build_map(base);
    std::vector<TrafficSchedule> schedules;
    for (int i = 0; i < runs; ++i) schedules.push_back(run_schedule(base, base.base_seed + i));
    std::vector<CellMetrics> cells;
    for (ProtocolKind p : {ProtocolKind::epidemic, ProtocolKind::prophet, ProtocolKind::bubblerap}) {
      ScenarioConfig c = base;
      c.protocol = p;
      ExperimentOptions eo;
      eo.map = &map;
      eo.schedules = &schedules;
      eo.on_run_done = [p](std::uint64_t seed, const RunResult& r) {
        say("  %s seed %llu: delivered %lld/%lld, forwardings %lld\n",
                    std::string(to_string(p)).c_str(), static_cast<unsigned long long>(seed),
                    static_cast<long long>(r.counters.delivered),
                    static_cast<long long>(r.counters.created),
                    static_cast<long long>(r.counters.forwardings));
      };
      const auto results = run_experiment(c, base.base_seed, runs, eo);
      cells.push_back(aggregate("acceptance", p, c.traffic.ttl / kSecondsPerHour, results));
    }
    if (!csv_path.empty()) text::write_file_atomic(csv_path, write_results_csv(cells));
    say("  comparison: %d seeds x 3 protocols in %.0f s\n", runs, seconds_since(t0));

    const auto epi = summarize(cells[0]);
    const auto pro = summarize(cells[1]);
    const auto bub = summarize(cells[2]);
    say("  epidemic  delivery %.4f delivered %.1f forwardings %.0f delay %.1f s\n",
                epi.delivery, epi.delivered, epi.forwardings, epi.delay);
    say("  prophet   delivery %.4f delivered %.1f forwardings %.0f delay %.1f s\n",
                pro.delivery, pro.delivered, pro.forwardings, pro.delay);
    say("  bubblerap delivery %.4f delivered %.1f forwardings %.0f delay %.1f s\n",
                bub.delivery, bub.delivered, bub.forwardings, bub.delay);

    const double gap = (pro.delivery - bub.delivery) * 100.0;
    if (wanted(7)) {
      report.line(7, false, {gap >= 5.0, "PROPHET - BubbleRap delivery = " + fmt(gap, 2) + " pp"});
    }
    if (wanted(8)) {
      const double more = pro.delivered - epi.delivered;
      report.line(8, false, {more > 0.0, "PROPHET - Epidemic delivered = " + fmt(more, 1)});
    }
    if (wanted(9)) {
      const double less = epi.forwardings > 0 ? 1.0 - pro.forwardings / epi.forwardings : 0.0;
      report.line(9, false, {pro.forwardings < epi.forwardings,
                             "PROPHET forwardings " + fmt(less * 100.0, 1) + "% below Epidemic"});
    }
    if (wanted(10)) {
      report.line(10, false, {pro.delay > epi.delay, "mean delay PROPHET " + fmt(pro.delay, 1) +
                                                         " s vs Epidemic " + fmt(epi.delay, 1) + " s"});
    }
    if (wanted(11)) {
      const double ratio = pro.forwardings > 0 ? bub.forwardings / pro.forwardings : 0.0;
      report.line(11, false, {ratio <= 0.70, "BubbleRap/PROPHET forwardings = " + fmt(ratio, 3) +
                                                 " (need <= 0.70)"});
    }
    if (wanted(12)) {
      const bool p_ok = pro.delivery >= 0.35 && pro.delivery <= 0.75;
      const bool b_ok = bub.delivery >= 0.15 && bub.delivery <= 0.55;
      report.line(12, false, {p_ok && b_ok, "soft target: PROPHET " + fmt(pro.delivery) +
                                                " in [0.35, 0.75], BubbleRap " + fmt(bub.delivery) +
                                                " in [0.15, 0.55]"});
    }
  }

  say("properties: %d failed; qualitative: %d/%d passed\n", report.property_failures,
              report.qualitative_passes, report.qualitative_total);
  if (!report_path.empty()) text::write_file_atomic(report_path, g_log);
  return report.property_failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace oppnet

int main(int argc, char** argv) {
  int runs = 10;
  std::string csv = "acceptance_results.csv";
  std::string report = "acceptance_report.txt";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--runs" && i + 1 < argc) {
      runs = std::atoi(argv[++i]);
    } else if (arg == "--csv" && i + 1 < argc) {
      csv = argv[++i];
    } else if (arg == "--report" && i + 1 < argc) {
      report = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      for (const auto& part : oppnet::text::split(argv[++i], ',')) only.insert(std::atoi(part.c_str()));
    } else {
      std::fprintf(stderr, "usage: %s [--runs N] [--csv PATH] [--report PATH] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }
  if (runs < 1) runs = 1;
  try {
    return oppnet::run_suite(runs, csv, report, only);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
