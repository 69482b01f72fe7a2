#include "oppnet/network.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "oppnet/text.hpp"

namespace oppnet {

void ContactDetector::detect(std::span<const Vec2> positions, double range,
                             std::vector<NodePair>& out) {
  out.clear();
  const auto n = positions.size();
  if (order_.size() != n) {
    order_.resize(n);
    for (NodeId i = 0; i < n; ++i) order_[i] = i;
  }
  // Insertion sort on x; cheap when the previous order is nearly right.
  for (std::size_t i = 1; i < n; ++i) {
    const NodeId v = order_[i];
    const double x = positions[v].x;
    std::size_t j = i;
    while (j > 0 && (positions[order_[j - 1]].x > x ||
                     (positions[order_[j - 1]].x == x && order_[j - 1] > v))) {
      order_[j] = order_[j - 1];
      --j;
    }
    order_[j] = v;
  }
  const double r2 = range * range;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = positions[order_[i]];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2& q = positions[order_[j]];
      if (q.x - p.x > range) break;
      const double dy = q.y - p.y;
      if (dy > range || dy < -range) continue;
      if (squared_distance(p, q) <= r2) out.emplace_back(order_[i], order_[j]);
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<NodePair> detect_contacts(std::span<const Vec2> positions, double range) {
  ContactDetector detector;
  std::vector<NodePair> out;
  detector.detect(positions, range, out);
  return out;
}

const ContactChanges& ContactTracker::update(std::span<const NodePair> current, double now) {
  changes_.up.clear();
  changes_.down.clear();
  next_active_.clear();
  next_starts_.clear();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < active_.size() || j < current.size()) {
    if (j == current.size() || (i < active_.size() && active_[i] < current[j])) {
      changes_.down.push_back({active_[i], starts_[i], now, bandwidth_});
      ++i;
    } else if (i == active_.size() || current[j] < active_[i]) {
      changes_.up.push_back(current[j]);
      next_active_.push_back(current[j]);
      next_starts_.push_back(now);
      ++j;
    } else {
      next_active_.push_back(active_[i]);
      next_starts_.push_back(starts_[i]);
      ++i;
      ++j;
    }
  }
  active_.swap(next_active_);
  starts_.swap(next_starts_);
  return changes_;
}

const ContactChanges& ContactTracker::close_all(double now) {
  return update({}, now);
}

bool ContactTracker::in_contact(NodePair pair) const {
  return std::binary_search(active_.begin(), active_.end(), pair);
}

double ContactTracker::start_of(NodePair pair) const {
  auto it = std::lower_bound(active_.begin(), active_.end(), pair);
  if (it == active_.end() || *it != pair) throw std::out_of_range("pair not in contact");
  return starts_[static_cast<std::size_t>(it - active_.begin())];
}

std::string serialize_contact_trace(std::vector<ContactEvent> events) {
  std::stable_sort(events.begin(), events.end(), [](const ContactEvent& a, const ContactEvent& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.pair < b.pair;
  });
  std::ostringstream out;
  out << "# a b start end\n";
  for (const auto& e : events) {
    out << e.pair.first << ' ' << e.pair.second << ' ' << text::format_double(e.start) << ' '
        << text::format_double(e.end) << '\n';
  }
  return out.str();
}

std::vector<ContactEvent> parse_contact_trace(std::string_view doc, double bandwidth) {
  std::vector<ContactEvent> events;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= doc.size()) {
    const auto eol = doc.find('\n', pos);
    const auto line =
        text::trim(doc.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
    pos = eol == std::string_view::npos ? doc.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split_ws(line);
    if (f.size() != 4) {
      throw std::runtime_error("contact trace line " + std::to_string(line_no) + ": malformed");
    }
    const auto a = text::parse_uint(f[0]);
    const auto b = text::parse_uint(f[1]);
    const auto s = text::parse_double(f[2]);
    const auto e = text::parse_double(f[3]);
    if (!a || !b || !s || !e || *a == *b || !(*s < *e)) {
      throw std::runtime_error("contact trace line " + std::to_string(line_no) + ": malformed");
    }
    events.push_back({NodePair(static_cast<NodeId>(*a), static_cast<NodeId>(*b)), *s, *e, bandwidth});
  }
  return events;
}

double share_link_budget(std::span<TransferJob* const> jobs, double budget) {
  std::vector<TransferJob*> pending;
  for (auto* j : jobs) {
    if (!j->done()) pending.push_back(j);
  }
  std::stable_sort(pending.begin(), pending.end(), [](const TransferJob* a, const TransferJob* b) {
    return a->bytes_remaining < b->bytes_remaining;
  });
  std::size_t i = 0;
  while (i < pending.size() && budget > 0.0) {
    const double share = budget / static_cast<double>(pending.size() - i);
    if (pending[i]->bytes_remaining <= share) {
      budget -= pending[i]->bytes_remaining;
      pending[i]->bytes_remaining = 0.0;
      ++i;
      continue;
    }
    for (std::size_t k = i; k < pending.size(); ++k) pending[k]->bytes_remaining -= share;
    budget = 0.0;
  }
  return std::max(budget, 0.0);
}

TransferOutcome advance_transfers(std::vector<TransferJob> jobs, std::span<const NodePair> contacts,
                                  double dt, double bandwidth) {
  TransferOutcome out;
  std::map<NodePair, std::vector<std::size_t>> links;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    links[NodePair(jobs[i].sender, jobs[i].receiver)].push_back(i);
  }
  std::vector<char> aborted(jobs.size(), 0);
  for (auto& [pair, idx] : links) {
    if (!std::binary_search(contacts.begin(), contacts.end(), pair)) {
      for (auto i : idx) aborted[i] = 1;
      continue;
    }
    std::vector<TransferJob*> ptrs;
    for (auto i : idx) ptrs.push_back(&jobs[i]);
    share_link_budget(ptrs, link_budget_bytes(bandwidth, dt));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (aborted[i]) {
      out.aborted.push_back(jobs[i]);
    } else if (jobs[i].done()) {
      out.completed.push_back(jobs[i]);
    } else {
      out.progressed.push_back(jobs[i]);
    }
  }
  return out;
}

}  // namespace oppnet
