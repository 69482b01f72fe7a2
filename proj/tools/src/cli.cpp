#include "oppnet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "oppnet/engine.hpp"
#include "oppnet/map_graph.hpp"
#include "oppnet/metrics.hpp"
#include "oppnet/scenario.hpp"
#include "oppnet/text.hpp"
#include "oppnet/traffic.hpp"

namespace oppnet::cli {
namespace {

struct CommonFlags {
  std::string config;
  std::string protocol;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  unsigned jobs = 0;
  bool quiet = false;
};

struct CompareFlags {
  std::string protocols = "epidemic,prophet,bubblerap";
  std::string ttl_hours = "24";
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--config", f.config, "Scenario file (default: built-in UEF scenario)");
  cmd.add_option("--protocol", f.protocol, "epidemic, prophet or bubblerap");
  cmd.add_option("--runs", f.runs, "Number of runs (seeds seed..seed+runs-1)");
  cmd.add_option("--seed", f.seed, "Base seed");
  cmd.add_option("--out", f.out, std::string("Output directory (default: $") + kOutDirEnv +
                                     " or ./results)");
  cmd.add_option("--set", f.sets, "Config override section.key=value (repeatable)");
  cmd.add_option("--jobs", f.jobs, "Concurrent runs (default: hardware threads)");
  cmd.add_flag("--quiet", f.quiet, "No progress on standard error");
}

ScenarioConfig resolve_config(const CommonFlags& f) {
  ScenarioConfig config = f.config.empty() ? default_uef_scenario() : load_config_file(f.config);
  for (const auto& s : f.sets) apply_override(config, s);
  if (!f.protocol.empty()) apply_override(config, "protocol.name=" + f.protocol);
  if (f.runs) config.runs = *f.runs;
  if (f.seed) config.base_seed = *f.seed;
  validate(config);
  return config;
}

std::string out_dir(const CommonFlags& f) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "results";
}

std::string ttl_label(double hours) { return text::format_double(hours); }

void write_provenance(const std::string& dir, const ScenarioConfig& config,
                      const std::vector<std::string>& args) {
  std::string header = "# oppnet";
  for (const auto& a : args) header += " " + a;
  text::write_file_atomic(dir + "/config.resolved", header + "\n" + serialize_config(config));
}

std::vector<ProtocolKind> parse_protocol_list(const std::string& list) {
  std::vector<ProtocolKind> out;
  for (const auto& name : text::split(list, ',')) {
    auto p = parse_protocol(text::trim(name));
    if (!p) {
      throw ConfigError(ConfigError::Kind::validation, "unknown protocol '" + name +
                                                           "' (valid: " +
                                                           std::string(kProtocolNames) + ")");
    }
    if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
  }
  if (out.empty()) throw ConfigError(ConfigError::Kind::validation, "no protocols given");
  return out;
}

std::vector<double> parse_ttl_list(const std::string& list) {
  std::vector<double> out;
  for (const auto& item : text::split(list, ',')) {
    auto v = text::parse_double(text::trim(item));
    if (!v || !(*v > 0.0)) {
      throw ConfigError(ConfigError::Kind::validation,
                        "invalid TTL '" + item + "' (hours, positive)");
    }
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError(ConfigError::Kind::validation, "no TTL values given");
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err, bool quiet) : out_(out), err_(err), quiet_(quiet) {}

  CellMetrics cell(const std::string& experiment, const ScenarioConfig& config,
                   const MapGraph& map, const std::vector<TrafficSchedule>* schedules,
                   const std::string& dir, unsigned jobs) {
    const double hours = config.traffic.ttl / kSecondsPerHour;
    const std::string label = std::string(to_string(config.protocol)) + "_ttl" + ttl_label(hours);
    ExperimentOptions eo;
    eo.jobs = jobs;
    eo.map = &map;
    eo.schedules = schedules;
    eo.on_run_done = [&](std::uint64_t seed, const RunResult& r) {
      text::write_file_atomic(dir + "/runs/" + label + "_seed" + std::to_string(seed) + ".txt",
                              serialize_run_result(r));
      if (!quiet_) {
        err_ << label << " seed " << seed << ": delivered " << r.counters.delivered << "/"
             << r.counters.created << ", forwardings " << r.counters.forwardings << std::endl;
      }
    };
    const auto results = run_experiment(config, config.base_seed, config.runs, eo);
    CellMetrics cell = aggregate(experiment, config.protocol, hours, results);
    text::write_file_atomic(dir + "/cells/" + label + ".csv",
                            write_results_csv(std::span<const CellMetrics>(&cell, 1)));
    out_ << label << ": delivery " << text::format_fixed(cell.delivery.mean, 4);
    if (cell.delivery.half_width) out_ << " +- " << text::format_fixed(*cell.delivery.half_width, 4);
    out_ << ", delivered " << text::format_fixed(cell.delivered, 1) << ", forwardings "
         << text::format_fixed(cell.forwardings, 1) << '\n';
    return cell;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool quiet_;
};

int cmd_run(const CommonFlags& f, const std::string& schedule_file,
            const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = resolve_config(f);
  const std::string dir = out_dir(f);
  std::vector<TrafficSchedule> schedules;
  if (!schedule_file.empty()) {
    schedules.assign(static_cast<std::size_t>(config.runs),
                     parse_schedule(text::read_file(schedule_file)));
  }
  write_provenance(dir, config, args);
  const MapGraph map = build_map(config);
  Runner runner(out, err, f.quiet);
  const CellMetrics cell =
      runner.cell("run", config, map, schedules.empty() ? nullptr : &schedules, dir, f.jobs);
  text::write_file_atomic(dir + "/results.csv",
                          write_results_csv(std::span<const CellMetrics>(&cell, 1)));
  out << "wrote " << dir << "/results.csv\n";
  return kExitOk;
}

int cmd_compare(const CommonFlags& f, const CompareFlags& c, const std::vector<std::string>& args,
                std::ostream& out, std::ostream& err) {
  const ScenarioConfig base = resolve_config(f);
  const auto protocols = parse_protocol_list(c.protocols);
  const auto ttls = parse_ttl_list(c.ttl_hours);
  const std::string dir = out_dir(f);
  write_provenance(dir, base, args);

  // Every cell replays the same schedule files.
  std::vector<TrafficSchedule> schedules;
  for (int i = 0; i < base.runs; ++i) {
    const std::uint64_t seed = base.base_seed + static_cast<std::uint64_t>(i);
    const std::string path = dir + "/schedules/seed" + std::to_string(seed) + ".txt";
    text::write_file_atomic(path, serialize_schedule(run_schedule(base, seed)));
    schedules.push_back(parse_schedule(text::read_file(path)));
  }

  const MapGraph map = build_map(base);
  Runner runner(out, err, f.quiet);
  std::vector<CellMetrics> cells;
  for (double ttl : ttls) {
    for (ProtocolKind p : protocols) {
      ScenarioConfig config = base;
      config.protocol = p;
      config.traffic.ttl = ttl * kSecondsPerHour;
      validate(config);
      cells.push_back(runner.cell("compare", config, map, &schedules, dir, f.jobs));
    }
  }
  text::write_file_atomic(dir + "/results.csv", write_results_csv(cells));
  out << "wrote " << dir << "/results.csv\n";
  return kExitOk;
}

int cmd_export_trace(const CommonFlags& f, const std::vector<std::string>& args,
                     std::ostream& out) {
  const ScenarioConfig config = resolve_config(f);
  const std::string dir = out_dir(f);
  const std::uint64_t seed = config.base_seed;
  write_provenance(dir, config, args);
  text::write_file_atomic(dir + "/schedule.txt", serialize_schedule(run_schedule(config, seed)));
  text::write_file_atomic(dir + "/contacts.txt",
                          serialize_contact_trace(record_contacts(config, seed)));
  out << "wrote " << dir << "/contacts.txt and " << dir << "/schedule.txt\n";
  return kExitOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Opportunistic network routing simulator", "oppnet"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string schedule_file;
  auto* run = app.add_subcommand("run", "Run one protocol over several seeds");
  add_common(*run, run_flags);
  run->add_option("--schedule", schedule_file, "Replay this traffic schedule in every run");

  CommonFlags compare_flags;
  CompareFlags compare;
  auto* cmp = app.add_subcommand("compare", "Every protocol x TTL cell on a shared workload");
  add_common(*cmp, compare_flags);
  cmp->add_option("--protocols", compare.protocols, "Comma-separated protocol names");
  cmp->add_option("--ttl-hours", compare.ttl_hours, "Comma-separated TTLs in hours");

  CommonFlags export_flags;
  auto* exp = app.add_subcommand("export-trace", "Write the contact trace and traffic schedule");
  add_common(*exp, export_flags);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, schedule_file, args, out, err);
    if (cmp->parsed()) return cmd_compare(compare_flags, compare, args, out, err);
    return cmd_export_trace(export_flags, args, out);
  } catch (const text::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace oppnet::cli
