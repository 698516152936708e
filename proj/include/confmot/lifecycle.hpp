#pragma once

#include <optional>

#include "confmot/domain.hpp"

// Birth, activation and death of tracklets.
//
// count_based:      active once hits >= min_hits, deleted after more than
//                   max_age consecutive misses; scores play no role.
// confidence_based: active while the score is above the detection threshold,
//                   deactivated on a miss below the active threshold, deleted
//                   below the deletion threshold.
// mixed:            activation needs both rules; deletion fires on either.

namespace confmot::lifecycle {

inline bool uses_scores(LifecycleMode m) { return m != LifecycleMode::count_based; }
inline bool uses_counts(LifecycleMode m) { return m != LifecycleMode::confidence_based; }

inline bool activation_rule(const TrackletStatus& t, const TrackerConfig& cfg) {
  bool ok = true;
  if (uses_scores(cfg.lifecycle)) ok = ok && t.score > cfg.detection_threshold;
  if (uses_counts(cfg.lifecycle)) ok = ok && t.hits >= cfg.min_hits;
  return ok;
}

inline TrackletStatus birth(const Detection& d, TrackId id, const TrackerConfig& cfg) {
  TrackletStatus t;
  t.id = id;
  t.class_label = d.class_label;
  t.score = d.score;
  t.hits = 1;
  t.misses = 0;
  t.age = 0;
  t.active = activation_rule(t, cfg);
  return t;
}

/// `fused_score` is the output of the score update for this frame.
inline TrackletStatus on_match(TrackletStatus t, double fused_score, const TrackerConfig& cfg) {
  t.score = fused_score;
  t.hits += 1;
  t.misses = 0;
  t.active = activation_rule(t, cfg);
  return t;
}

/// Returns nullopt when the tracklet must be deleted. The score is expected
/// to carry this frame's decay already.
inline std::optional<TrackletStatus> on_miss(TrackletStatus t, const TrackerConfig& cfg) {
  t.misses += 1;
  bool remove = false;
  if (uses_counts(cfg.lifecycle) && cfg.max_age && t.misses > *cfg.max_age) remove = true;
  if (uses_scores(cfg.lifecycle) && t.score < cfg.deletion_threshold) remove = true;
  if (remove) return std::nullopt;
  if (uses_scores(cfg.lifecycle) && t.score < cfg.active_threshold) t.active = false;
  return t;
}

}  // namespace confmot::lifecycle
