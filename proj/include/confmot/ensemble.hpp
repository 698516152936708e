#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "confmot/domain.hpp"
#include "confmot/score.hpp"

// Late fusion of two per-frame track streams ("a" and "b").

namespace confmot::ensemble {

enum class Strategy { affirmative, unanimous, confidence };

/// Which stream's scores are decayed before fusion.
///   decay_a / decay_b / decay_both: every track of the named stream(s),
///     matched or not.
///   decay_both_if_unmatched: only tracks without a cross-stream partner.
enum class DecayPolicy { decay_a, decay_b, decay_both, decay_both_if_unmatched };

struct Config {
  Strategy strategy = Strategy::confidence;
  DecayPolicy decay_policy = DecayPolicy::decay_both_if_unmatched;
  double sigma = 0.2;
  double cross_gate = 2.0;
  UpdateFn update_fn = UpdateFn::complement_mult;

  friend bool operator==(const Config&, const Config&) = default;
};

inline void validate(const Config& c) {
  if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw Error(ErrorKind::ConfigError, "sigma must be >= 0");
  if (!(c.cross_gate > 0.0)) throw Error(ErrorKind::ConfigError, "cross_gate must be positive");
}

struct CrossMatch {
  std::size_t a = 0;  // record index in frame a
  std::size_t b = 0;  // record index in frame b
  double distance = 0.0;

  friend bool operator==(const CrossMatch&, const CrossMatch&) = default;
};

struct CrossAssignment {
  std::vector<CrossMatch> matches;
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;
};

inline double center_distance(const TrackRecord& a, const TrackRecord& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Greedy per-class cross-stream matching. Pairs listed in `remembered`
/// (id_a, id_b) are re-matched first while within the gate; then stream-a
/// records, highest score first, each take the nearest free b record of the
/// same class within the gate.
inline CrossAssignment cross_match(const FrameOutput& frame_a, const FrameOutput& frame_b, double cross_gate,
                                   const std::set<std::pair<TrackId, TrackId>>& remembered = {}) {
  if (frame_a.frame_index != frame_b.frame_index) {
    throw Error(ErrorKind::FrameMismatch, "cannot fuse frame " + std::to_string(frame_a.frame_index) +
                                              " with frame " + std::to_string(frame_b.frame_index));
  }
  const auto& ra = frame_a.records;
  const auto& rb = frame_b.records;
  std::vector<char> used_a(ra.size(), 0), used_b(rb.size(), 0);
  CrossAssignment out;

  if (!remembered.empty()) {
    for (std::size_t i = 0; i < ra.size(); ++i) {
      for (std::size_t j = 0; j < rb.size(); ++j) {
        if (used_b[j] || ra[i].class_label != rb[j].class_label) continue;
        if (!remembered.contains({ra[i].track_id, rb[j].track_id})) continue;
        const double d = center_distance(ra[i], rb[j]);
        if (d > cross_gate) continue;
        used_a[i] = used_b[j] = 1;
        out.matches.push_back({i, j, d});
        break;
      }
    }
  }

  std::vector<std::size_t> order(ra.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return ra[x].score > ra[y].score; });
  for (std::size_t i : order) {
    if (used_a[i]) continue;
    std::size_t best = rb.size();
    double best_d = kInf;
    for (std::size_t j = 0; j < rb.size(); ++j) {
      if (used_b[j] || ra[i].class_label != rb[j].class_label) continue;
      const double d = center_distance(ra[i], rb[j]);
      if (d <= cross_gate && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < rb.size()) {
      used_a[i] = used_b[best] = 1;
      out.matches.push_back({i, best, best_d});
    }
  }
  std::sort(out.matches.begin(), out.matches.end(), [](const CrossMatch& x, const CrossMatch& y) { return x.a < y.a; });
  for (std::size_t i = 0; i < ra.size(); ++i)
    if (!used_a[i]) out.unmatched_a.push_back(i);
  for (std::size_t j = 0; j < rb.size(); ++j)
    if (!used_b[j]) out.unmatched_b.push_back(j);
  return out;
}

// Output ids of the stateless fusers below are placeholders (0); the Fuser
// assigns merged ids.

namespace detail {

inline TrackRecord pick_geometry(const TrackRecord& a, const TrackRecord& b) { return b.score > a.score ? b : a; }

inline TrackRecord as_output(TrackRecord r, double score) {
  r.track_id = 0;
  r.score = score::clamp_unit(score);
  r.active = true;
  return r;
}

/// One slot per source in the fixed order: matched pairs, strays of a, strays
/// of b. Empty slots are records the strategy does not emit.
inline std::vector<std::optional<TrackRecord>> fuse_slots(const FrameOutput& a, const FrameOutput& b,
                                                         const CrossAssignment& m, const Config& cfg) {
  std::vector<std::optional<TrackRecord>> slots;
  slots.reserve(m.matches.size() + m.unmatched_a.size() + m.unmatched_b.size());

  if (cfg.strategy != Strategy::confidence) {
    for (const auto& x : m.matches) {
      const TrackRecord& ra = a.records[x.a];
      const TrackRecord& rb = b.records[x.b];
      slots.push_back(as_output(pick_geometry(ra, rb), std::max(ra.score, rb.score)));
    }
    const bool keep_strays = cfg.strategy == Strategy::affirmative;
    for (std::size_t i : m.unmatched_a) {
      slots.push_back(keep_strays ? std::optional(as_output(a.records[i], a.records[i].score)) : std::nullopt);
    }
    for (std::size_t j : m.unmatched_b) {
      slots.push_back(keep_strays ? std::optional(as_output(b.records[j], b.records[j].score)) : std::nullopt);
    }
    return slots;
  }

  const bool always_a = cfg.decay_policy == DecayPolicy::decay_a || cfg.decay_policy == DecayPolicy::decay_both;
  const bool always_b = cfg.decay_policy == DecayPolicy::decay_b || cfg.decay_policy == DecayPolicy::decay_both;
  const bool strays_a = always_a || cfg.decay_policy == DecayPolicy::decay_both_if_unmatched;
  const bool strays_b = always_b || cfg.decay_policy == DecayPolicy::decay_both_if_unmatched;
  auto decayed = [&](double s, bool apply) { return apply ? score::decay_score(s, cfg.sigma) : s; };
  auto slot = [](const TrackRecord& r, double s) -> std::optional<TrackRecord> {
    if (!(s > 0.0)) return std::nullopt;
    return as_output(r, s);
  };

  for (const auto& x : m.matches) {
    const TrackRecord& ra = a.records[x.a];
    const TrackRecord& rb = b.records[x.b];
    const double fused = score::fuse(cfg.update_fn, decayed(ra.score, always_a), decayed(rb.score, always_b));
    slots.push_back(slot(pick_geometry(ra, rb), fused));
  }
  for (std::size_t i : m.unmatched_a) slots.push_back(slot(a.records[i], decayed(a.records[i].score, strays_a)));
  for (std::size_t j : m.unmatched_b) slots.push_back(slot(b.records[j], decayed(b.records[j].score, strays_b)));
  return slots;
}

inline FrameOutput collect(std::int64_t frame_index, std::vector<std::optional<TrackRecord>> slots) {
  FrameOutput out{frame_index, {}};
  for (auto& s : slots)
    if (s) out.records.push_back(std::move(*s));
  return out;
}

}  // namespace detail

/// Union: each matched pair once (geometry and score of the stronger member),
/// plus every unmatched record of both streams.
inline FrameOutput fuse_affirmative(const FrameOutput& a, const FrameOutput& b, const CrossAssignment& m) {
  Config cfg;
  cfg.strategy = Strategy::affirmative;
  return detail::collect(a.frame_index, detail::fuse_slots(a, b, m, cfg));
}

/// Intersection: matched pairs only.
inline FrameOutput fuse_unanimous(const FrameOutput& a, const FrameOutput& b, const CrossAssignment& m) {
  Config cfg;
  cfg.strategy = Strategy::unanimous;
  return detail::collect(a.frame_index, detail::fuse_slots(a, b, m, cfg));
}

/// Score-refining fusion: matched pairs combine their (policy-decayed)
/// scores with the update function; strays keep their (policy-decayed)
/// score. Records whose score reaches zero are dropped.
inline FrameOutput fuse_confidence(const FrameOutput& a, const FrameOutput& b, const CrossAssignment& m,
                                   Config cfg) {
  cfg.strategy = Strategy::confidence;
  return detail::collect(a.frame_index, detail::fuse_slots(a, b, m, cfg));
}

/// Stateful fusion of one sequence: remembers cross-stream pairs and owns the
/// merged output ids.
///
/// A pair (id_a, id_b) keeps its merged id while it re-matches. When a pair
/// splits, the a-member keeps the merged id (the b-member too if a is gone).
/// Merged ids are unique within a frame and never reused.
class Fuser {
 public:
  explicit Fuser(Config cfg) : cfg_(cfg) { validate(cfg_); }

  const Config& config() const noexcept { return cfg_; }

  FrameOutput step(const FrameOutput& a, const FrameOutput& b) {
    const CrossAssignment m = cross_match(a, b, cfg_.cross_gate, pairs_);
    auto slots = detail::fuse_slots(a, b, m, cfg_);

    struct Source {
      std::optional<TrackId> a, b;
    };
    std::vector<Source> sources;
    sources.reserve(slots.size());
    for (const auto& x : m.matches) sources.push_back({a.records[x.a].track_id, b.records[x.b].track_id});
    for (std::size_t i : m.unmatched_a) sources.push_back({a.records[i].track_id, std::nullopt});
    for (std::size_t j : m.unmatched_b) sources.push_back({std::nullopt, b.records[j].track_id});

    std::set<TrackId> claimed;
    std::set<std::pair<TrackId, TrackId>> next_pairs;
    FrameOutput out{a.frame_index, {}};
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const Source& src = sources[k];
      if (src.a && src.b) next_pairs.insert({*src.a, *src.b});
      if (!slots[k]) continue;
      TrackRecord r = std::move(*slots[k]);
      r.track_id = merged_id(src.a, src.b, claimed);
      claimed.insert(r.track_id);
      if (src.a) by_a_[*src.a] = r.track_id;
      if (src.b) by_b_[*src.b] = r.track_id;
      out.records.push_back(std::move(r));
    }
    pairs_ = std::move(next_pairs);
    std::sort(out.records.begin(), out.records.end(),
              [](const TrackRecord& x, const TrackRecord& y) { return x.track_id < y.track_id; });
    return out;
  }

 private:
  TrackId merged_id(std::optional<TrackId> a, std::optional<TrackId> b, const std::set<TrackId>& claimed) {
    auto lookup = [&](const std::unordered_map<TrackId, TrackId>& map,
                      std::optional<TrackId> key) -> std::optional<TrackId> {
      if (!key) return std::nullopt;
      auto it = map.find(*key);
      if (it == map.end() || claimed.contains(it->second)) return std::nullopt;
      return it->second;
    };
    if (auto id = lookup(by_a_, a)) return *id;
    if (auto id = lookup(by_b_, b)) return *id;
    return next_id_++;
  }

  Config cfg_;
  std::set<std::pair<TrackId, TrackId>> pairs_;
  std::unordered_map<TrackId, TrackId> by_a_, by_b_;
  TrackId next_id_ = 1;
};

/// Fuses two runs of the same sequence. Frames are aligned by index; a frame
/// missing from one stream is treated as empty.
inline std::vector<FrameOutput> fuse_sequence(const Config& cfg, std::span<const FrameOutput> a,
                                              std::span<const FrameOutput> b) {
  std::map<std::int64_t, std::pair<FrameOutput, FrameOutput>> frames;
  for (const auto& f : a) frames[f.frame_index].first = f;
  for (const auto& f : b) frames[f.frame_index].second = f;
  Fuser fuser(cfg);
  std::vector<FrameOutput> out;
  for (auto& [idx, pair] : frames) {
    pair.first.frame_index = idx;
    pair.second.frame_index = idx;
    out.push_back(fuser.step(pair.first, pair.second));
  }
  return out;
}

}  // namespace confmot::ensemble
