#include "oppnet/traffic.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "oppnet/rng.hpp"
#include "oppnet/text.hpp"

namespace oppnet {

std::vector<SourceDestination> build_pairs(std::size_t node_count, int pair_count,
                                           std::uint64_t seed) {
  if (pair_count < 0) throw std::invalid_argument("pair_count must be >= 0");
  const std::uint64_t possible = node_count < 2 ? 0 : node_count * (node_count - 1);
  if (static_cast<std::uint64_t>(pair_count) > possible) {
    throw std::invalid_argument("pair_count " + std::to_string(pair_count) + " exceeds n*(n-1) = " +
                                std::to_string(possible));
  }
  Rng rng = Rng::stream(seed, 0x70616972ULL);
  std::vector<SourceDestination> pairs;
  if (static_cast<std::uint64_t>(pair_count) * 2 > possible) {
    for (NodeId s = 0; s < node_count; ++s) {
      for (NodeId d = 0; d < node_count; ++d) {
        if (s != d) pairs.push_back({s, d});
      }
    }
    for (std::size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[rng.uniform_int(0, i - 1)]);
    }
    pairs.resize(static_cast<std::size_t>(pair_count));
  } else {
    std::set<SourceDestination> chosen;
    while (chosen.size() < static_cast<std::size_t>(pair_count)) {
      const auto s = static_cast<NodeId>(rng.uniform_int(0, node_count - 1));
      const auto d = static_cast<NodeId>(rng.uniform_int(0, node_count - 1));
      if (s != d) chosen.insert({s, d});
    }
    pairs.assign(chosen.begin(), chosen.end());
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

TrafficSchedule build_schedule(std::span<const SourceDestination> pairs,
                               const TrafficConfig& config, double duration, std::uint64_t seed) {
  TrafficSchedule schedule;
  if (pairs.empty() || config.messages_per_day <= 0 || !(duration > 0.0)) return schedule;
  Rng rng(seed);
  const double rate = config.messages_per_day / kSecondsPerDay;
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate);
    if (t >= duration) break;
    const auto& pair = pairs[rng.uniform_int(0, pairs.size() - 1)];
    const auto size = static_cast<std::int64_t>(rng.uniform_int(
        static_cast<std::uint64_t>(config.size_min), static_cast<std::uint64_t>(config.size_max)));
    schedule.entries.push_back(
        {t, pair.source, pair.destination, size, static_cast<MessageId>(schedule.entries.size())});
  }
  return schedule;
}

std::string serialize_schedule(const TrafficSchedule& schedule) {
  std::ostringstream out;
  out << "# time source destination size id\n";
  for (const auto& e : schedule.entries) {
    out << text::format_double(e.time) << ' ' << e.source << ' ' << e.destination << ' ' << e.size
        << ' ' << e.id << '\n';
  }
  return out.str();
}

TrafficSchedule parse_schedule(std::string_view doc) {
  TrafficSchedule schedule;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= doc.size()) {
    const auto eol = doc.find('\n', pos);
    const auto line =
        text::trim(doc.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
    pos = eol == std::string_view::npos ? doc.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error("schedule line " + std::to_string(line_no) + ": " + why);
    };
    const auto f = text::split_ws(line);
    if (f.size() != 5) fail("expected 5 fields");
    const auto t = text::parse_double(f[0]);
    const auto s = text::parse_uint(f[1]);
    const auto d = text::parse_uint(f[2]);
    const auto size = text::parse_int(f[3]);
    const auto id = text::parse_uint(f[4]);
    if (!t || !s || !d || !size || !id) fail("malformed field");
    if (*s == *d) fail("source equals destination");
    if (*size < 1) fail("size must be positive");
    if (*id != schedule.entries.size()) fail("ids must be dense and in order");
    if (!schedule.entries.empty() && *t < schedule.entries.back().time) fail("times must not decrease");
    schedule.entries.push_back({*t, static_cast<NodeId>(*s), static_cast<NodeId>(*d), *size,
                                static_cast<MessageId>(*id)});
  }
  return schedule;
}

}  // namespace oppnet
