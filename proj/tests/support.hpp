#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "confmot/confmot.hpp"
#include "oracles/classic_tracker.hpp"
#include "oracles/sweep_oracle.hpp"

// Configurations, scenario builders and hand-made fixtures shared by the
// unit tests and the acceptance checks.

namespace support {

using namespace confmot;

/// Classic starting point: overwrite, no decay, count lifecycle, max_age 3.
inline TrackerConfig count_baseline() {
  TrackerConfig c;
  c.update_fn = UpdateFn::overwrite;
  c.score_decay = 0.0;
  c.lifecycle = LifecycleMode::count_based;
  c.max_age = 3;
  c.min_hits = 1;
  return c;
}

/// Confidence lifecycle with complement_mult, no max_age, active 0.75,
/// detection 0.15.
inline TrackerConfig confidence_tuned(double sigma) {
  TrackerConfig c;
  c.update_fn = UpdateFn::complement_mult;
  c.score_decay = sigma;
  c.lifecycle = LifecycleMode::confidence_based;
  c.max_age = std::nullopt;
  c.active_threshold = 0.75;
  c.detection_threshold = 0.15;
  c.deletion_threshold = 0.0;
  return c;
}

/// Grid base for the decay x max_age sweeps: both death rules on, baseline
/// thresholds.
inline TrackerConfig ablation_base() {
  TrackerConfig c;
  c.lifecycle = LifecycleMode::mixed;
  return c;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

/// A scenario with randomized corruption levels, reproducible from `i`.
inline synth::ScenarioSpec random_spec(std::uint64_t i) {
  Rng r(0xC0FFEE + i);
  synth::ScenarioSpec s;
  s.name = "random-" + std::to_string(i);
  s.seed = 500 + i;
  s.n_frames = 30 + static_cast<int>(r.below(31));
  s.n_objects = 5 + static_cast<int>(r.below(11));
  s.position_noise_sigma = r.uniform(0.0, 0.3);
  s.dropout_prob = r.uniform(0.0, 0.2);
  s.clutter_rate = r.uniform(0.0, 4.0);
  s.arena_half_size = 25.0;
  return s;
}

/// Two detection streams over the same ground truth; the second is noisier
/// in every respect.
inline std::pair<synth::ScenarioSpec, synth::ScenarioSpec> ensemble_streams(std::uint64_t i) {
  synth::ScenarioSpec a;
  a.name = "ensemble-" + std::to_string(i);
  a.seed = 6000 + i;
  a.n_frames = 40;
  a.n_objects = 10;
  synth::ScenarioSpec b = a;
  a.detection_seed = 2 * a.seed + 1;
  a.position_noise_sigma = 0.1;
  a.dropout_prob = 0.15;
  a.clutter_rate = 2.0;
  b.detection_seed = 2 * b.seed + 2;
  b.position_noise_sigma = 0.2;
  b.dropout_prob = 0.25;
  b.clutter_rate = 4.0;
  return {a, b};
}

inline std::vector<oracle::ClassicFrame> to_classic(const DetectionSequence& seq) {
  std::vector<oracle::ClassicFrame> out;
  for (const auto& f : seq.frames) {
    oracle::ClassicFrame cf;
    cf.index = f.frame_index;
    for (const auto& d : f.detections) cf.dets.push_back({d.class_label, d.cx, d.cy, d.score});
    out.push_back(std::move(cf));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation fixtures
// ---------------------------------------------------------------------------

inline GtAnnotation gt_at(std::int64_t frame, std::int64_t id, double x, double y, std::string label = "car") {
  GtAnnotation g;
  g.frame_index = frame;
  g.instance_id = id;
  g.class_label = std::move(label);
  g.x = x;
  g.y = y;
  g.extent = {4.0, 2.0, 1.5};
  return g;
}

inline TrackRecord track_at(std::int64_t frame, TrackId id, double x, double y, double score,
                            std::string label = "car") {
  TrackRecord r;
  r.frame_index = frame;
  r.track_id = id;
  r.class_label = std::move(label);
  r.x = x;
  r.y = y;
  r.extent = {4.0, 2.0, 1.5};
  r.score = score;
  return r;
}

struct MetricFixture {
  std::string name;
  std::vector<GtSequence> gt;
  std::vector<TrackSequence> tracks;
  std::int64_t fp = 0, fn = 0, ids = 0, gt_boxes = 0;
  double mota = 0.0;
};

inline MetricFixture make_fixture(std::string name, std::vector<GtFrame> gtf, std::vector<FrameOutput> tf,
                                  std::int64_t fp, std::int64_t fn, std::int64_t ids, std::int64_t gt, double mota) {
  MetricFixture f;
  f.name = std::move(name);
  f.gt = {{"s", std::move(gtf)}};
  f.tracks = {{"s", std::move(tf)}};
  f.fp = fp;
  f.fn = fn;
  f.ids = ids;
  f.gt_boxes = gt;
  f.mota = mota;
  return f;
}

/// perfect:   predictions equal ground truth.
/// one_fp_two_fn: 10 ground-truth boxes, one extra box, two misses.
/// crossing:  two objects meet; the tracker loses one and restarts it.
inline std::vector<MetricFixture> metric_fixtures() {
  std::vector<MetricFixture> out;
  {
    std::vector<GtFrame> g;
    std::vector<FrameOutput> t;
    for (int f = 0; f < 5; ++f) {
      g.push_back({f, {gt_at(f, 1, f, 0.0), gt_at(f, 2, 10.0, f)}});
      t.push_back({f, {track_at(f, 7, f, 0.0, 0.9), track_at(f, 8, 10.0, f, 0.9)}});
    }
    out.push_back(make_fixture("perfect", g, t, 0, 0, 0, 10, 1.0));
  }
  {
    std::vector<GtFrame> g;
    std::vector<FrameOutput> t;
    for (int f = 0; f < 5; ++f) {
      g.push_back({f, {gt_at(f, 1, f, 0.0), gt_at(f, 2, 10.0, f)}});
      FrameOutput fo{f, {track_at(f, 7, f + 0.3, 0.0, 0.9)}};
      if (f != 2 && f != 3) fo.records.push_back(track_at(f, 8, 10.0, f - 0.2, 0.9));
      if (f == 1) fo.records.push_back(track_at(f, 9, -20.0, -20.0, 0.9));
      t.push_back(fo);
    }
    // 1 - (1 + 2 + 0) / 10
    out.push_back(make_fixture("one_fp_two_fn", g, t, 1, 2, 0, 10, 1.0 - 3.0 / 10.0));
  }
  {
    std::vector<GtFrame> g;
    std::vector<FrameOutput> t;
    for (int f = 0; f < 6; ++f) {
      const double ax = f - 3.0, ay = 0.0;
      const double bx = 0.5, by = f - 3.0;
      g.push_back({f, {gt_at(f, 1, ax, ay), gt_at(f, 2, bx, by)}});
      FrameOutput fo{f, {track_at(f, 2, bx, by, 0.9)}};
      fo.records.push_back(track_at(f, f < 3 ? 1 : 3, ax, ay, 0.9));
      t.push_back(fo);
    }
    // one switch over 12 boxes
    out.push_back(make_fixture("crossing", g, t, 0, 0, 1, 12, 1.0 - 1.0 / 12.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random toy sequences for the sweep oracle
// ---------------------------------------------------------------------------

inline std::vector<oracle::ToySequence> random_toy(std::uint64_t seed) {
  Rng r(seed * 31 + 5);
  std::vector<oracle::ToySequence> seqs(1 + r.below(2));
  std::int64_t next_track = 100;
  for (auto& seq : seqs) {
    const int frames = 6 + static_cast<int>(r.below(8));
    const int objects = 2 + static_cast<int>(r.below(4));
    std::vector<double> x(objects), y(objects), vx(objects), vy(objects);
    std::vector<std::int64_t> track(objects);
    for (int o = 0; o < objects; ++o) {
      x[o] = r.uniform(-8, 8);
      y[o] = r.uniform(-8, 8);
      vx[o] = r.uniform(-1, 1);
      vy[o] = r.uniform(-1, 1);
      track[o] = next_track++;
    }
    for (int f = 0; f < frames; ++f) {
      oracle::ToyFrame tf;
      for (int o = 0; o < objects; ++o) {
        const double gx = x[o] + vx[o] * f, gy = y[o] + vy[o] * f;
        tf.gt.push_back({o + 1, gx, gy});
        if (r.uniform() < 0.15) track[o] = next_track++;
        if (r.uniform() < 0.8) {
          // scores on a coarse grid so that thresholds tie
          const double score = 0.1 * static_cast<double>(1 + r.below(9));
          tf.pred.push_back({track[o], gx + r.normal(0, 0.8), gy + r.normal(0, 0.8), score});
        }
      }
      const auto clutter = r.below(3);
      for (std::uint64_t c = 0; c < clutter; ++c)
        tf.pred.push_back({next_track++, r.uniform(-10, 10), r.uniform(-10, 10), 0.1 * static_cast<double>(1 + r.below(9))});
      seq.push_back(std::move(tf));
    }
  }
  return seqs;
}

inline std::vector<GtSequence> toy_gt(const std::vector<oracle::ToySequence>& toy) {
  std::vector<GtSequence> out;
  for (std::size_t s = 0; s < toy.size(); ++s) {
    GtSequence seq{"toy-" + std::to_string(s), {}};
    for (std::size_t f = 0; f < toy[s].size(); ++f) {
      GtFrame gf{static_cast<std::int64_t>(f), {}};
      for (const auto& g : toy[s][f].gt) gf.objects.push_back(gt_at(gf.frame_index, g.id, g.x, g.y));
      seq.frames.push_back(std::move(gf));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

inline std::vector<TrackSequence> toy_tracks(const std::vector<oracle::ToySequence>& toy) {
  std::vector<TrackSequence> out;
  for (std::size_t s = 0; s < toy.size(); ++s) {
    TrackSequence seq{"toy-" + std::to_string(s), {}};
    for (std::size_t f = 0; f < toy[s].size(); ++f) {
      FrameOutput fo{static_cast<std::int64_t>(f), {}};
      for (const auto& p : toy[s][f].pred) fo.records.push_back(track_at(fo.frame_index, p.id, p.x, p.y, p.score));
      seq.frames.push_back(std::move(fo));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace support
