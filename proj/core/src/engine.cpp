#include "oppnet/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "oppnet/buffer.hpp"
#include "oppnet/rng.hpp"
#include "oppnet/routing.hpp"
#include "oppnet/text.hpp"

namespace oppnet {

MapGraph build_map(const ScenarioConfig& config) {
  if (!config.world.map_file.empty()) {
    MapGraph map = parse_map(text::read_file(config.world.map_file));
    map.validate();
    return map;
  }
  MapLayout layout;
  layout.people_groups = config.people_group_count();
  layout.bus_routes = config.bus_route_count();
  layout.homes_per_group = config.world.homes_per_group;
  layout.offices_per_group = config.world.offices_per_group;
  layout.meeting_spots_per_group = config.world.meeting_spots_per_group;
  layout.stops_per_route = config.world.stops_per_route;
  layout.grid_spacing = config.world.grid_spacing;
  return generate_map(config.world.width, config.world.height, config.world.map_seed, layout);
}

std::vector<SourceDestination> experiment_pairs(const ScenarioConfig& config) {
  return build_pairs(static_cast<std::size_t>(config.node_count), config.traffic.pair_count,
                     config.traffic.pair_seed);
}

TrafficSchedule run_schedule(const ScenarioConfig& config, std::uint64_t seed) {
  const auto pairs = experiment_pairs(config);
  const std::uint64_t traffic_seed = Rng::stream(seed, 2).next_u64();
  return build_schedule(pairs, config.traffic, config.sim_duration, traffic_seed);
}

namespace {

struct LinkDirection {
  std::vector<ForwardDecision> queue;
  std::size_t next = 0;
  std::optional<TransferJob> active;
  std::vector<MessageId> sent;  // completed over this contact, sorted
  bool planned = false;
  std::uint64_t sender_version = 0;
  std::uint64_t receiver_version = 0;
  std::uint64_t epoch = 0;
};

struct Link {
  LinkDirection dir[2];  // 0: first -> second, 1: second -> first
  int turn = 0;          // direction offered the link first
};

struct NodeState {
  explicit NodeState(std::int64_t capacity) : buffer(capacity) {}

  Buffer buffer;
  std::vector<char> delivered;  // destination copies, by message id
  std::vector<char> incoming;   // message ids in flight towards this node
  int active_jobs = 0;          // as sender or receiver
  std::uint64_t version = 0;
};

struct DeliveredCopy {
  double expires_at;
  NodeId node;
  MessageId id;

  bool operator>(const DeliveredCopy& o) const {
    if (expires_at != o.expires_at) return expires_at > o.expires_at;
    if (node != o.node) return node > o.node;
    return id > o.id;
  }
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options)
      : config_(config),
        options_(options),
        n_(static_cast<std::size_t>(config.node_count)),
        dt_(config.tick),
        tracker_(config.radio.bandwidth) {
    validate(config_);
    result_.seed = seed;
    result_.protocol = config.protocol;
    result_.ttl = config.traffic.ttl;
    result_.invariants.checked = options.check_invariants;

    if (options.schedule) {
      schedule_ = options.schedule;
    } else {
      owned_schedule_ = run_schedule(config, seed);
      schedule_ = &owned_schedule_;
    }
    for (const auto& e : schedule_->entries) {
      if (e.source >= n_ || e.destination >= n_) {
        throw ConfigError(ConfigError::Kind::validation,
                          "schedule references node " +
                              std::to_string(std::max(e.source, e.destination)) +
                              " but the scenario has " + std::to_string(n_) + " nodes");
      }
    }

    if (!options.scripted_contacts) {
      if (options.map) {
        map_ = options.map;
      } else {
        owned_map_ = std::make_unique<MapGraph>(build_map(config));
        map_ = owned_map_.get();
      }
      mobility_.emplace(config_, *map_, Rng::stream(seed, 1), options.mobility_observer);
    }

    router_ = make_router(config.protocol, n_, config);
    nodes_.reserve(n_);
    const std::size_t m = schedule_->entries.size();
    for (std::size_t i = 0; i < n_; ++i) {
      nodes_.emplace_back(config.traffic.buffer_capacity);
      nodes_.back().delivered.assign(m, 0);
      nodes_.back().incoming.assign(m, 0);
    }
    messages_.reserve(m);
    expected_copies_.assign(m, 0);
    actual_copies_.assign(m, 0);
  }

  RunResult run() {
    const auto ticks = static_cast<std::int64_t>(std::ceil(config_.sim_duration / dt_ - 1e-9));
    const auto beacon_every =
        std::max<std::int64_t>(1, std::llround(config_.radio.beacon_interval / dt_));
    double next_progress = kSecondsPerHour;
    for (std::int64_t k = 0; k < ticks; ++k) {
      now_ = static_cast<double>(k) * dt_;
      if (k > 0 && mobility_) mobility_->step(dt_);
      expire();
      inject();
      if (k % beacon_every == 0) sample_contacts();
      advance_links();
      if (options_.check_invariants) check_invariants();
      if (options_.progress && now_ >= next_progress) {
        options_.progress(now_, config_.sim_duration);
        next_progress += kSecondsPerHour;
      }
    }
    const auto& closing = tracker_.close_all(config_.sim_duration);
    if (options_.contact_trace) {
      options_.contact_trace->insert(options_.contact_trace->end(), closing.down.begin(),
                                     closing.down.end());
    }
    return std::move(result_);
  }

 private:
  bool measured(MessageId id) const { return result_.messages[id].measured; }

  bool holds(NodeId node, MessageId id) const {
    const auto& s = nodes_[node];
    return s.buffer.contains(id) || s.delivered[id] != 0;
  }

  void violation(const std::string& what) {
    if (result_.invariants.violations++ == 0) {
      result_.invariants.first_violation = "t=" + text::format_double(now_) + ": " + what;
    }
  }

  void count_expired(NodeId node, const std::vector<Message>& gone) {
    if (gone.empty()) return;
    for (const auto& m : gone) {
      --expected_copies_[m.id];
      if (measured(m.id)) ++result_.counters.expirations;
    }
    ++nodes_[node].version;
  }

  void expire() {
    for (NodeId i = 0; i < n_; ++i) {
      if (nodes_[i].buffer.next_expiry() <= now_) count_expired(i, nodes_[i].buffer.expire(now_));
    }
    while (!delivered_heap_.empty() && delivered_heap_.front().expires_at <= now_) {
      std::pop_heap(delivered_heap_.begin(), delivered_heap_.end(), std::greater<>{});
      const auto top = delivered_heap_.back();
      delivered_heap_.pop_back();
      nodes_[top.node].delivered[top.id] = 0;
      ++nodes_[top.node].version;
      --expected_copies_[top.id];
      if (measured(top.id)) ++result_.counters.expirations;
    }
  }

  void inject() {
    const auto& entries = schedule_->entries;
    while (next_entry_ < entries.size() && entries[next_entry_].time <= now_ &&
           entries[next_entry_].time < config_.sim_duration) {
      const auto& e = entries[next_entry_++];
      Message m{e.id, e.source, e.destination, e.size, e.time, config_.traffic.ttl};
      MessageRecord rec;
      rec.id = e.id;
      rec.source = e.source;
      rec.destination = e.destination;
      rec.size = e.size;
      rec.created_at = e.time;
      rec.measured = e.time >= config_.warmup;
      messages_.push_back(m);
      result_.messages.push_back(rec);
      if (rec.measured) ++result_.counters.created;
      if (m.expired(now_)) continue;

      auto admit = nodes_[e.source].buffer.admit(m, now_);
      count_expired(e.source, admit.expired);
      if (admit.admitted) {
        ++expected_copies_[m.id];
        live_.push_back(m.id);
      } else if (rec.measured) {
        ++result_.counters.rejected;
      }
      for (const auto& ev : admit.evicted) evicted(ev.id);
      ++nodes_[e.source].version;
    }
  }

  void evicted(MessageId id) {
    --expected_copies_[id];
    if (measured(id)) ++result_.counters.evictions;
  }

  void current_scripted(std::vector<NodePair>& out) const {
    out.clear();
    for (const auto& c : *options_.scripted_contacts) {
      if (c.start <= now_ && now_ < c.end) out.push_back(c.pair);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  void sample_contacts() {
    if (mobility_) {
      detector_.detect(mobility_->positions(), config_.radio.range, current_);
    } else {
      current_scripted(current_);
    }
    const auto& changes = tracker_.update(current_, now_);
    for (const auto& down : changes.down) {
      auto it = links_.find(down.pair);
      if (it != links_.end()) {
        for (auto& d : it->second.dir) {
          if (d.active) abort_job(*d.active);
        }
        links_.erase(it);
      }
      router_->on_contact_down(down.pair.first, down.pair.second, down.duration(), now_);
      if (router_->stateful()) {
        ++nodes_[down.pair.first].version;
        ++nodes_[down.pair.second].version;
      }
      if (options_.contact_trace) options_.contact_trace->push_back(down);
    }
    for (const auto& up : changes.up) {
      router_->on_contact_up(up.first, up.second, now_);
      if (router_->stateful()) {
        ++nodes_[up.first].version;
        ++nodes_[up.second].version;
      }
      links_.emplace(up, Link{});
    }
  }

  void release(const TransferJob& job) {
    --nodes_[job.sender].active_jobs;
    --nodes_[job.receiver].active_jobs;
  }

  bool idle(NodeId n) const {
    return config_.radio.concurrency == TransferConcurrency::link || nodes_[n].active_jobs == 0;
  }

  void abort_job(const TransferJob& job) {
    release(job);
    nodes_[job.receiver].incoming[job.message] = 0;
    ++nodes_[job.receiver].version;
    if (measured(job.message)) ++result_.counters.aborted;
  }

  void plan(LinkDirection& d, NodeId sender, NodeId receiver) {
    auto& rs = nodes_[receiver];
    PeerSummary peer{receiver, [&rs](MessageId id) {
                       return rs.buffer.contains(id) || rs.delivered[id] != 0 ||
                              rs.incoming[id] != 0;
                     }};
    d.queue = plan_replications(*router_, sender, nodes_[sender].buffer, peer, now_);
    d.next = 0;
    d.planned = true;
    d.sender_version = nodes_[sender].version;
    d.receiver_version = nodes_[receiver].version;
    d.epoch = router_->epoch(now_);
  }

  bool job_valid(const TransferJob& job) const {
    return nodes_[job.sender].buffer.contains(job.message) &&
           !messages_[job.message].expired(now_);
  }

  /// Starts the next admissible offer; false when the queue is exhausted.
  bool start_next(LinkDirection& d, NodeId sender, NodeId receiver) {
    if (!d.planned || d.sender_version != nodes_[sender].version ||
        d.receiver_version != nodes_[receiver].version || d.epoch != router_->epoch(now_)) {
      plan(d, sender, receiver);
    }
    while (d.next < d.queue.size()) {
      const MessageId id = d.queue[d.next++].message;
      const Message& m = messages_[id];
      if (!nodes_[sender].buffer.contains(id) || m.expired(now_)) continue;
      if (holds(receiver, id) || nodes_[receiver].incoming[id]) continue;
      if (!config_.radio.resend_in_contact &&
          std::binary_search(d.sent.begin(), d.sent.end(), id)) {
        continue;
      }
      nodes_[receiver].incoming[id] = 1;
      ++nodes_[sender].active_jobs;
      ++nodes_[receiver].active_jobs;
      d.active = TransferJob{id, sender, receiver, m.size, static_cast<double>(m.size), now_};
      return true;
    }
    return false;
  }

  void advance_links() {
    const double budget_per_tick = link_budget_bytes(config_.radio.bandwidth, dt_);
    for (auto& [pair, link] : links_) {
      const NodeId ends[2][2] = {{pair.first, pair.second}, {pair.second, pair.first}};
      for (auto& d : link.dir) {
        if (d.active && !job_valid(*d.active)) {
          abort_job(*d.active);
          d.active.reset();
        }
      }
      TransferJob* jobs[2];
      std::size_t count = 0;
      for (int k = 0; k < 2; ++k) {
        const int s = link.turn ^ k;
        auto& d = link.dir[s];
        if (!d.active && idle(ends[s][0]) && idle(ends[s][1]) &&
            start_next(d, ends[s][0], ends[s][1])) {
          link.turn = s ^ 1;
        }
        if (d.active) jobs[count++] = &*d.active;
      }
      if (count == 0) continue;
      const double left = share_link_budget(std::span<TransferJob* const>(jobs, count), budget_per_tick);
      if (options_.check_invariants && !(left >= 0.0 && left <= budget_per_tick)) {
        violation("link budget exceeded");
      }
      for (auto& d : link.dir) {
        if (d.active && d.active->done()) {
          if (!config_.radio.resend_in_contact) {
            d.sent.insert(std::lower_bound(d.sent.begin(), d.sent.end(), d.active->message),
                          d.active->message);
          }
          complete(*d.active);
          d.active.reset();
        }
      }
    }
  }

  void complete(const TransferJob& job) {
    release(job);
    const double at = now_ + dt_;
    const Message& m = messages_[job.message];
    auto& rs = nodes_[job.receiver];
    rs.incoming[job.message] = 0;
    ++rs.version;
    if (m.expired(at)) {
      if (measured(m.id)) ++result_.counters.aborted;
      return;
    }
    if (options_.check_invariants && job.started_at < m.created_at) {
      violation("message " + std::to_string(m.id) + " sent before creation");
    }
    auto& rec = result_.messages[m.id];
    ++rec.transfers;
    if (rec.measured) ++result_.counters.forwardings;

    if (job.receiver == m.destination) {
      if (rs.delivered[m.id]) {
        if (rec.measured) ++result_.counters.rejected;
        return;
      }
      rs.delivered[m.id] = 1;
      ++expected_copies_[m.id];
      delivered_heap_.push_back({m.expires_at(), job.receiver, m.id});
      std::push_heap(delivered_heap_.begin(), delivered_heap_.end(), std::greater<>{});
      if (!rec.delivered) {
        if (options_.check_invariants && !(at > m.created_at && at < m.expires_at())) {
          violation("message " + std::to_string(m.id) + " delivered outside its lifetime");
        }
        rec.delivered = true;
        rec.delivered_at = at;
        if (rec.measured) {
          ++result_.counters.delivered;
          ++result_.counters.delivery_transfers;
        }
      }
      return;
    }
    auto admit = rs.buffer.admit(m, now_);
    count_expired(job.receiver, admit.expired);
    for (const auto& ev : admit.evicted) evicted(ev.id);
    if (admit.admitted) {
      ++expected_copies_[m.id];
    } else if (rec.measured) {
      ++result_.counters.rejected;
    }
  }

  void check_invariants() {
    ++result_.invariants.ticks_checked;
    for (NodeId i = 0; i < n_; ++i) {
      const auto& b = nodes_[i].buffer;
      std::int64_t bytes = 0;
      for (const auto& s : b.entries()) {
        bytes += s.message.size;
        ++actual_copies_[s.message.id];
        if (s.received_at < s.message.created_at) {
          violation("node " + std::to_string(i) + " holds message " +
                    std::to_string(s.message.id) + " before its creation");
        }
      }
      if (bytes != b.occupancy() || bytes > b.capacity()) {
        violation("buffer occupancy mismatch at node " + std::to_string(i));
      }
    }
    for (const auto& copy : delivered_heap_) {
      if (!nodes_[copy.node].delivered[copy.id]) violation("delivered store out of sync");
      ++actual_copies_[copy.id];
    }
    std::size_t keep = 0;
    for (const MessageId id : live_) {
      const std::int64_t copies = actual_copies_[id];
      if (copies != expected_copies_[id]) {
        violation("message " + std::to_string(id) + " has " + std::to_string(copies) +
                  " copies, expected " + std::to_string(expected_copies_[id]));
      }
      actual_copies_[id] = 0;
      if (expected_copies_[id] > 0 || copies > 0) live_[keep++] = id;
    }
    live_.resize(keep);
    for (const auto& [pair, link] : links_) {
      if (!tracker_.in_contact(pair)) violation("transfer on a link without contact");
      for (const auto& d : link.dir) {
        if (d.active && d.active->started_at < messages_[d.active->message].created_at) {
          violation("transfer started before creation");
        }
      }
    }
  }

  ScenarioConfig config_;
  const RunOptions& options_;
  std::size_t n_;
  double dt_;
  double now_ = 0.0;

  const TrafficSchedule* schedule_ = nullptr;
  TrafficSchedule owned_schedule_;
  const MapGraph* map_ = nullptr;
  std::unique_ptr<MapGraph> owned_map_;
  std::optional<MobilityModel> mobility_;
  std::unique_ptr<Router> router_;

  ContactDetector detector_;
  ContactTracker tracker_;
  std::vector<NodePair> current_;
  std::map<NodePair, Link> links_;

  std::vector<NodeState> nodes_;
  std::vector<Message> messages_;
  std::size_t next_entry_ = 0;
  std::vector<DeliveredCopy> delivered_heap_;  // min-heap on expiry

  std::vector<std::int64_t> expected_copies_;
  std::vector<std::int64_t> actual_copies_;
  std::vector<MessageId> live_;

  RunResult result_;
};

}  // namespace

RunResult run(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options) {
  Simulation sim(config, seed, options);
  return sim.run();
}

std::vector<ContactEvent> record_contacts(const ScenarioConfig& config, std::uint64_t seed,
                                          const MapGraph* map) {
  validate(config);
  std::unique_ptr<MapGraph> owned;
  if (!map) {
    owned = std::make_unique<MapGraph>(build_map(config));
    map = owned.get();
  }
  MobilityModel mobility(config, *map, Rng::stream(seed, 1));
  ContactDetector detector;
  ContactTracker tracker(config.radio.bandwidth);
  std::vector<NodePair> current;
  std::vector<ContactEvent> events;
  const auto ticks = static_cast<std::int64_t>(std::ceil(config.sim_duration / config.tick - 1e-9));
  const auto beacon_every =
      std::max<std::int64_t>(1, std::llround(config.radio.beacon_interval / config.tick));
  for (std::int64_t k = 0; k < ticks; ++k) {
    if (k > 0) mobility.step(config.tick);
    if (k % beacon_every != 0) continue;
    detector.detect(mobility.positions(), config.radio.range, current);
    const auto& changes = tracker.update(current, static_cast<double>(k) * config.tick);
    events.insert(events.end(), changes.down.begin(), changes.down.end());
  }
  const auto& closing = tracker.close_all(config.sim_duration);
  events.insert(events.end(), closing.down.begin(), closing.down.end());
  return events;
}

std::vector<RunResult> run_experiment(const ScenarioConfig& config, std::uint64_t base_seed,
                                      int runs, const ExperimentOptions& options) {
  validate(config);
  if (options.schedules && options.schedules->size() < static_cast<std::size_t>(runs)) {
    throw ConfigError(ConfigError::Kind::validation, "fewer replay schedules than runs");
  }
  std::unique_ptr<MapGraph> owned;
  const MapGraph* map = options.map;
  if (!map) {
    owned = std::make_unique<MapGraph>(build_map(config));
    map = owned.get();
  }
  std::vector<RunResult> results(static_cast<std::size_t>(std::max(runs, 0)));
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(results.size()));

  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= results.size()) return;
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      try {
        RunOptions ro;
        ro.map = map;
        if (options.schedules) ro.schedule = &(*options.schedules)[i];
        const std::uint64_t seed = base_seed + i;
        results[i] = run(config, seed, ro);
        if (options.on_run_done) {
          std::lock_guard lock(mutex);
          options.on_run_done(seed, results[i]);
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string serialize_run_result(const RunResult& r) {
  std::ostringstream out;
  const auto& c = r.counters;
  out << "seed " << r.seed << '\n'
      << "protocol " << to_string(r.protocol) << '\n'
      << "ttl " << text::format_double(r.ttl) << '\n'
      << "created " << c.created << '\n'
      << "delivered " << c.delivered << '\n'
      << "forwardings " << c.forwardings << '\n'
      << "delivery_transfers " << c.delivery_transfers << '\n'
      << "aborted " << c.aborted << '\n'
      << "evictions " << c.evictions << '\n'
      << "expirations " << c.expirations << '\n'
      << "rejected " << c.rejected << '\n';
  if (r.invariants.checked) {
    out << "invariant_ticks " << r.invariants.ticks_checked << '\n'
        << "invariant_violations " << r.invariants.violations << '\n';
  }
  out << "# id source destination size created_at measured delivered_at transfers\n";
  for (const auto& m : r.messages) {
    out << m.id << ' ' << m.source << ' ' << m.destination << ' ' << m.size << ' '
        << text::format_double(m.created_at) << ' ' << (m.measured ? 1 : 0) << ' '
        << (m.delivered ? text::format_double(m.delivered_at) : std::string("-")) << ' '
        << m.transfers << '\n';
  }
  return out.str();
}

}  // namespace oppnet
