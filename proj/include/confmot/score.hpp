#pragma once

#include <algorithm>

#include "confmot/domain.hpp"

// Tracklet score refinement: a constant decay in the prediction step, and an
// update function that combines the decayed tracklet score with the score of
// the matched detection.

namespace confmot::score {

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Estimated score for the current frame, floored at zero.
inline double decay_score(double previous, double sigma) {
  return std::max(0.0, previous - sigma);
}

// The raw_* functions are the unclamped update rules; the fuse_* wrappers
// keep the result inside [0, 1].

inline double raw_overwrite(double /*tracklet*/, double detection) { return detection; }
inline double raw_add(double tracklet, double detection) { return tracklet + detection; }
inline double raw_max(double tracklet, double detection) { return std::max(tracklet, detection); }

inline double raw_complement_mult(double tracklet, double detection) {
  return 1.0 - (1.0 - tracklet) * (1.0 - detection);
}

/// Parallel combination of the two complements. When both complements are
/// zero the limit is 1.
inline double raw_complement_parallel(double tracklet, double detection) {
  const double a = 1.0 - tracklet;
  const double b = 1.0 - detection;
  const double denom = a + b;
  if (denom <= 0.0) return 1.0;
  return 1.0 - (a * b) / denom;
}

inline double fuse_overwrite(double c, double s) { return clamp_unit(raw_overwrite(c, s)); }
inline double fuse_add(double c, double s) { return clamp_unit(raw_add(c, s)); }
inline double fuse_max(double c, double s) { return clamp_unit(raw_max(c, s)); }
inline double fuse_complement_mult(double c, double s) { return clamp_unit(raw_complement_mult(c, s)); }
inline double fuse_complement_parallel(double c, double s) { return clamp_unit(raw_complement_parallel(c, s)); }

inline double fuse(UpdateFn fn, double tracklet, double detection) {
  switch (fn) {
    case UpdateFn::overwrite: return fuse_overwrite(tracklet, detection);
    case UpdateFn::add: return fuse_add(tracklet, detection);
    case UpdateFn::max: return fuse_max(tracklet, detection);
    case UpdateFn::complement_mult: return fuse_complement_mult(tracklet, detection);
    case UpdateFn::complement_parallel: return fuse_complement_parallel(tracklet, detection);
  }
  return detection;
}

/// Score after a match. `decayed_tracklet_score` must already carry this
/// frame's decay.
inline double refine_on_match(double decayed_tracklet_score, double detection_score, const TrackerConfig& cfg) {
  return fuse(cfg.update_fn, decayed_tracklet_score, detection_score);
}

/// True for the update functions that never return less than either input.
inline constexpr bool satisfies_match_criterion(UpdateFn fn) { return fn != UpdateFn::overwrite; }

}  // namespace confmot::score
