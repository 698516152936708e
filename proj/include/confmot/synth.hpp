#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "confmot/domain.hpp"
#include "confmot/random.hpp"

// Seeded synthetic scenes: ground-truth trajectories plus a corrupted
// detection stream (position noise, dropout, occlusion, clutter, scores).

namespace confmot::synth {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

struct ClassSpec {
  std::string label;
  Extent extent;

  friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

struct Occlusion {
  int object = 0;  // 0-based object index
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;  // inclusive

  friend bool operator==(const Occlusion&, const Occlusion&) = default;
};

enum class Layout {
  random,    // independent start points and headings
  crossing,  // object pairs whose paths meet near the middle of the sequence
};

struct ScenarioSpec {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> detection_seed;  // corruption draws; defaults to seed
  int n_frames = 40;
  int n_objects = 10;
  std::vector<ClassSpec> classes = {{"car", {4.5, 1.9, 1.6}}, {"pedestrian", {0.7, 0.7, 1.8}}};
  Layout layout = Layout::random;
  double arena_half_size = 40.0;  // square arena [-h, h]^2
  double speed_min = 0.3;         // m / frame
  double speed_max = 1.2;
  double yaw_rate_max = 0.0;      // rad / frame
  double crossing_offset = 0.3;   // closest-approach distance of crossing pairs, m
  double position_noise_sigma = 0.0;
  double dropout_prob = 0.0;
  double clutter_rate = 0.0;      // expected false positives per frame
  BetaParams tp_score{8.0, 2.0};
  BetaParams fp_score{2.0, 5.0};
  std::vector<Occlusion> occlusions;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

inline void validate(const ScenarioSpec& s) {
  auto fail = [&](const std::string& m) { throw Error(ErrorKind::InvalidSpec, s.name + ": " + m); };
  auto prob = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (s.n_frames < 1) fail("n_frames must be >= 1");
  if (s.n_objects < 0) fail("n_objects must be >= 0");
  if (s.classes.empty()) fail("at least one class is required");
  for (const auto& c : s.classes) {
    if (c.label.empty()) fail("class label must not be empty");
    if (!(c.extent.length > 0 && c.extent.width > 0 && c.extent.height > 0)) fail("class extents must be positive");
  }
  if (!(s.arena_half_size > 0.0)) fail("arena_half_size must be positive");
  if (!(s.speed_min >= 0.0 && s.speed_max >= s.speed_min)) fail("speed range is invalid");
  if (!(s.yaw_rate_max >= 0.0)) fail("yaw_rate_max must be >= 0");
  if (!(s.crossing_offset >= 0.0)) fail("crossing_offset must be >= 0");
  if (!(s.position_noise_sigma >= 0.0)) fail("position_noise_sigma must be >= 0");
  if (!prob(s.dropout_prob)) fail("dropout_prob must lie in [0,1]");
  if (!(s.clutter_rate >= 0.0 && s.clutter_rate <= 500.0)) fail("clutter_rate must lie in [0,500]");
  for (const BetaParams& b : {s.tp_score, s.fp_score}) {
    if (!(b.alpha > 0.0 && b.beta > 0.0)) fail("beta parameters must be positive");
  }
  for (const auto& o : s.occlusions) {
    if (o.object < 0 || o.object >= s.n_objects) fail("occlusion refers to an unknown object");
    if (o.first_frame > o.last_frame) fail("occlusion window is empty");
  }
}

struct Scenario {
  GtSequence gt;
  DetectionSequence detections;
  std::int64_t clutter_count = 0;
  std::int64_t dropped_count = 0;  // random dropouts only (not occlusions)
};

namespace detail {

struct Mover {
  std::size_t cls = 0;
  double x = 0.0, y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double yaw_rate = 0.0;
};

inline std::vector<Mover> place_objects(const ScenarioSpec& spec, Rng& rng) {
  const double h = spec.arena_half_size;
  std::vector<Mover> movers(static_cast<std::size_t>(spec.n_objects));
  for (auto& m : movers) {
    m.cls = static_cast<std::size_t>(rng.below(spec.classes.size()));
    m.x = rng.uniform(-h, h);
    m.y = rng.uniform(-h, h);
    m.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    m.speed = rng.uniform(spec.speed_min, spec.speed_max);
    m.yaw_rate = rng.uniform(-spec.yaw_rate_max, spec.yaw_rate_max);
  }
  if (spec.layout == Layout::crossing) {
    // Pair (2k, 2k+1) shares class and meets at frame `meet` near a common
    // point; the second member moves perpendicular to the first.
    for (std::size_t k = 0; k + 1 < movers.size(); k += 2) {
      Mover& a = movers[k];
      Mover& b = movers[k + 1];
      b.cls = a.cls;
      b.yaw_rate = a.yaw_rate = 0.0;
      b.speed = a.speed;
      b.heading = a.heading + 0.5 * std::numbers::pi;
      const double meet = 0.5 * spec.n_frames + rng.uniform(-2.0, 2.0);
      const double px = rng.uniform(-0.5 * h, 0.5 * h);
      const double py = rng.uniform(-0.5 * h, 0.5 * h);
      // Offset b sideways (along a's heading) so the paths pass at the
      // requested distance.
      const double ox = spec.crossing_offset * std::cos(a.heading);
      const double oy = spec.crossing_offset * std::sin(a.heading);
      a.x = px - a.speed * meet * std::cos(a.heading);
      a.y = py - a.speed * meet * std::sin(a.heading);
      b.x = px + ox - b.speed * meet * std::cos(b.heading);
      b.y = py + oy - b.speed * meet * std::sin(b.heading);
    }
  }
  return movers;
}

inline bool occluded(const ScenarioSpec& spec, int object, std::int64_t frame) {
  for (const auto& o : spec.occlusions)
    if (o.object == object && frame >= o.first_frame && frame <= o.last_frame) return true;
  return false;
}

}  // namespace detail

/// Ground truth and detections for one scenario; a pure function of `spec`.
///
/// Per frame the corruption draws happen in this order: position noise for
/// every object (x, y, z), dropout for every object, clutter count, clutter
/// placement (x, y, class, yaw per clutter), then scores (true positives in
/// object order, then clutter).
inline Scenario generate(const ScenarioSpec& spec) {
  validate(spec);
  Rng world(spec.seed);
  Rng noise(spec.detection_seed.value_or(spec.seed ^ 0x9e3779b97f4a7c15ULL));
  auto movers = detail::place_objects(spec, world);
  const double h = spec.arena_half_size;

  Scenario out;
  out.gt.name = spec.name;
  out.detections.name = spec.name;
  const std::size_t n = movers.size();
  std::vector<double> nx(n), ny(n), nz(n);
  std::vector<char> dropped(n);

  for (std::int64_t frame = 0; frame < spec.n_frames; ++frame) {
    GtFrame gt_frame{frame, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const auto& m = movers[i];
      const Extent& e = spec.classes[m.cls].extent;
      gt_frame.objects.push_back({frame, static_cast<std::int64_t>(i + 1), spec.classes[m.cls].label, m.x, m.y,
                                  0.5 * e.height, e, normalize_yaw(m.heading)});
    }

    for (std::size_t i = 0; i < n; ++i) {
      nx[i] = noise.normal(0.0, 1.0) * spec.position_noise_sigma;
      ny[i] = noise.normal(0.0, 1.0) * spec.position_noise_sigma;
      nz[i] = noise.normal(0.0, 1.0) * spec.position_noise_sigma;
    }
    for (std::size_t i = 0; i < n; ++i) {
      dropped[i] = noise.bernoulli(spec.dropout_prob) ? 1 : 0;
      if (dropped[i]) ++out.dropped_count;
      if (detail::occluded(spec, static_cast<int>(i), frame)) dropped[i] = 1;
    }
    const auto clutter = static_cast<std::size_t>(noise.poisson(spec.clutter_rate));
    out.clutter_count += static_cast<std::int64_t>(clutter);
    std::vector<Detection> fps(clutter);
    for (auto& d : fps) {
      d.frame_index = frame;
      d.cx = noise.uniform(-h, h);
      d.cy = noise.uniform(-h, h);
      const ClassSpec& c = spec.classes[static_cast<std::size_t>(noise.below(spec.classes.size()))];
      d.class_label = c.label;
      d.extent = c.extent;
      d.cz = 0.5 * c.extent.height;
      d.yaw = normalize_yaw(noise.uniform(-std::numbers::pi, std::numbers::pi));
    }

    DetectionFrame det_frame{frame, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (dropped[i]) continue;
      const GtAnnotation& g = gt_frame.objects[i];
      Detection d;
      d.frame_index = frame;
      d.class_label = g.class_label;
      d.cx = g.x + nx[i];
      d.cy = g.y + ny[i];
      d.cz = g.z + nz[i];
      d.extent = g.extent;
      d.yaw = g.yaw;
      d.score = noise.beta(spec.tp_score.alpha, spec.tp_score.beta);
      det_frame.detections.push_back(std::move(d));
    }
    for (auto& d : fps) {
      d.score = noise.beta(spec.fp_score.alpha, spec.fp_score.beta);
      det_frame.detections.push_back(std::move(d));
    }
    out.gt.frames.push_back(std::move(gt_frame));
    out.detections.frames.push_back(std::move(det_frame));

    for (auto& m : movers) {
      m.x += m.speed * std::cos(m.heading);
      m.y += m.speed * std::sin(m.heading);
      m.heading += m.yaw_rate;
    }
  }
  return out;
}

/// Fixed scenario lists used by the tests and the `synth --suite` command.
/// Changing any value here changes every downstream number; bump
/// kSuiteVersion when doing so.
inline constexpr int kSuiteVersion = 1;

inline std::vector<std::string> suite_names() { return {"easy", "occlusion", "clutter", "crossing"}; }

inline std::vector<ScenarioSpec> scenario_suite(const std::string& name, int count = 20) {
  std::uint64_t base = 0;
  if (name == "easy") base = 1000;
  else if (name == "occlusion") base = 2000;
  else if (name == "clutter") base = 3000;
  else if (name == "crossing") base = 4000;
  else throw Error(ErrorKind::InvalidSpec, "unknown suite '" + name + "'");

  std::vector<ScenarioSpec> out;
  for (int i = 0; i < count; ++i) {
    ScenarioSpec s;
    s.name = name + "-" + std::to_string(i);
    s.seed = base + static_cast<std::uint64_t>(i);
    if (name == "easy") {
      s.n_frames = 30;
      s.n_objects = 8;
    } else if (name == "occlusion") {
      s.position_noise_sigma = 0.1;
      s.dropout_prob = 0.02;
      s.clutter_rate = 1.0;
      // Every object gets one or two bursts of 2-5 missing frames.
      Rng windows(s.seed * 7919ULL + 17ULL);
      for (int obj = 0; obj < s.n_objects; ++obj) {
        const int bursts = 1 + static_cast<int>(windows.below(2));
        for (int b = 0; b < bursts; ++b) {
          const auto len = static_cast<std::int64_t>(2 + windows.below(4));
          const auto first = static_cast<std::int64_t>(3 + windows.below(static_cast<std::uint64_t>(s.n_frames - 10)));
          s.occlusions.push_back({obj, first, first + len - 1});
        }
      }
    } else if (name == "clutter") {
      s.position_noise_sigma = 0.1;
      s.dropout_prob = 0.05;
      s.clutter_rate = 6.0;
      s.fp_score = {2.0, 5.0};
    } else {
      s.layout = Layout::crossing;
      s.position_noise_sigma = 0.15;
      s.dropout_prob = 0.05;
      s.clutter_rate = 0.5;
      s.crossing_offset = 0.3;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace confmot::synth
