#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oppnet/types.hpp"

namespace oppnet {

/// All pairs within `range` metres (inclusive), sorted, first < second.
std::vector<NodePair> detect_contacts(std::span<const Vec2> positions, double range);

/// Sweep-and-prune contact detector. Keeps the x-order between calls, so
/// the per-tick sort is nearly linear for slowly moving nodes.
class ContactDetector {
 public:
  /// Same result as detect_contacts, written into `out`.
  void detect(std::span<const Vec2> positions, double range, std::vector<NodePair>& out);

 private:
  std::vector<NodeId> order_;
};

struct ContactEvent {
  NodePair pair;
  double start = 0.0;
  double end = 0.0;
  double bandwidth = 0.0;  // bit/s

  double duration() const { return end - start; }
};

struct ContactChanges {
  std::vector<NodePair> up;
  std::vector<ContactEvent> down;  // closed events
};

/// Turns successive contact samples into up/down events.
class ContactTracker {
 public:
  explicit ContactTracker(double bandwidth) : bandwidth_(bandwidth) {}

  /// `current` must be sorted. Pairs absent from it are closed at `now`.
  const ContactChanges& update(std::span<const NodePair> current, double now);
  /// Closes every open contact (end of simulation).
  const ContactChanges& close_all(double now);

  std::span<const NodePair> active() const { return active_; }
  bool in_contact(NodePair pair) const;
  double start_of(NodePair pair) const;

 private:
  double bandwidth_;
  std::vector<NodePair> active_;
  std::vector<double> starts_;
  ContactChanges changes_;
  std::vector<NodePair> next_active_;
  std::vector<double> next_starts_;
};

/// One line per closed contact, `a b start end`, sorted by start then pair.
std::string serialize_contact_trace(std::vector<ContactEvent> events);
std::vector<ContactEvent> parse_contact_trace(std::string_view text, double bandwidth = 0.0);

struct TransferJob {
  MessageId message = 0;
  NodeId sender = 0;
  NodeId receiver = 0;
  std::int64_t size = 0;         // bytes
  double bytes_remaining = 0.0;  // in [0, size]
  double started_at = 0.0;

  bool done() const { return bytes_remaining <= 0.0; }
};

/// Shares `budget` bytes equally among `jobs`, handing what a finishing job
/// does not need to the others. Returns the unused budget.
double share_link_budget(std::span<TransferJob* const> jobs, double budget);

struct TransferOutcome {
  std::vector<TransferJob> completed;
  std::vector<TransferJob> progressed;
  std::vector<TransferJob> aborted;
};

/// Advances every job by one interval of `dt` seconds at `bandwidth` bit/s
/// per link. Jobs on links missing from `contacts` (sorted) are aborted and
/// move no bytes.
TransferOutcome advance_transfers(std::vector<TransferJob> jobs, std::span<const NodePair> contacts,
                                  double dt, double bandwidth);

inline double link_budget_bytes(double bandwidth, double dt) { return bandwidth * dt / 8.0; }

}  // namespace oppnet
