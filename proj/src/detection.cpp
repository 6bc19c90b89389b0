#include "telesim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace telesim::detection {

const char* detector_name(DetectorId id) {
  switch (id) {
    case DetectorId::D0: return "D0";
    case DetectorId::DPlus0: return "D+0";
    case DetectorId::DMinus0: return "D-0";
    case DetectorId::D1: return "D1";
    case DetectorId::D2: return "D2";
    case DetectorId::DPlus3: return "D+3";
    case DetectorId::DMinus3: return "D-3";
  }
  return "?";
}

std::optional<DetectionEvent> detect(const Arrival& arrival,
                                     const DetectorConfig& cfg, Rng& rng) {
  if (arrival.photon_count <= 0) return std::nullopt;
  double p_fire = cfg.efficiency;
  if (arrival.photon_count > 1)
    p_fire = 1.0 - std::pow(1.0 - cfg.efficiency, arrival.photon_count);
  if (!rng.bernoulli(p_fire)) return std::nullopt;
  return DetectionEvent{arrival.detector, arrival.time, true};
}

std::vector<DetectionEvent> detect_counting(const Arrival& arrival,
                                            const DetectorConfig& cfg,
                                            Rng& rng) {
  std::vector<DetectionEvent> events;
  for (int i = 0; i < arrival.photon_count; ++i)
    if (rng.bernoulli(cfg.efficiency))
      events.push_back({arrival.detector, arrival.time, true});
  return events;
}

std::vector<DetectionEvent> dark_counts(const DetectorConfig& cfg,
                                        std::uint64_t n_slots, Rng& rng) {
  std::vector<DetectionEvent> events;
  if (cfg.dark_rate <= 0.0 || n_slots == 0) return events;
  const std::uint64_t k = rng.poisson(cfg.dark_rate * double(n_slots));
  events.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i)
    events.push_back({cfg.id, rng.uniform() * double(n_slots), false});
  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
  return events;
}

std::vector<CoincidenceRecord> match_coincidences(
    std::vector<DetectionEvent> events, const std::vector<DetectorId>& pattern,
    double window, const std::map<DetectorId, double>& delays) {
  if (pattern.empty())
    throw std::invalid_argument("match_coincidences: empty pattern");
  if (window <= 0.0)
    throw std::invalid_argument("match_coincidences: window must be positive");
  for (std::size_t i = 0; i < pattern.size(); ++i)
    for (std::size_t j = i + 1; j < pattern.size(); ++j)
      if (pattern[i] == pattern[j])
        throw std::invalid_argument("match_coincidences: repeated detector");

  auto delay_of = [&](DetectorId id) {
    auto it = delays.find(id);
    return it == delays.end() ? 0.0 : it->second;
  };

  // Per-detector queues sorted by adjusted time.
  struct Entry {
    double adjusted;
    double raw;
  };
  std::vector<std::vector<Entry>> queues(pattern.size());
  for (const DetectionEvent& ev : events) {
    for (std::size_t k = 0; k < pattern.size(); ++k)
      if (ev.detector == pattern[k]) {
        queues[k].push_back({ev.time + delay_of(ev.detector), ev.time});
        break;
      }
  }
  for (auto& q : queues)
    std::sort(q.begin(), q.end(), [](const Entry& a, const Entry& b) {
      return a.adjusted < b.adjusted;
    });

  std::vector<std::size_t> head(pattern.size(), 0);
  std::vector<CoincidenceRecord> records;
  while (true) {
    // Earliest pending event across the pattern.
    std::size_t lead = pattern.size();
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      if (head[k] >= queues[k].size()) continue;
      if (lead == pattern.size() ||
          queues[k][head[k]].adjusted < queues[lead][head[lead]].adjusted)
        lead = k;
    }
    if (lead == pattern.size()) break;
    const double t0 = queues[lead][head[lead]].adjusted;

    bool complete = true;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      if (head[k] >= queues[k].size() ||
          queues[k][head[k]].adjusted > t0 + window) {
        complete = false;
        break;
      }
    }
    if (!complete) {
      // Nothing can complete the earliest event; it is lost for good.
      ++head[lead];
      continue;
    }
    CoincidenceRecord rec;
    rec.pattern = pattern;
    rec.times.resize(pattern.size());
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      rec.times[k] = queues[k][head[k]].raw;
      ++head[k];
    }
    const double anchor = *std::min_element(rec.times.begin(), rec.times.end());
    rec.pulse_id = anchor <= 0.0 ? 0 : std::uint64_t(std::llround(anchor));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace telesim::detection
