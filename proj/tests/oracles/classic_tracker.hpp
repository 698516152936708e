#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

// A plain count-based point tracker in the CenterPoint style, written
// without the library's pipeline: constant-velocity prediction, greedy
// matching by detection score within a fixed center-distance gate, birth for
// every unmatched detection, death after more than max_age misses. Output is
// the set of (track id, frame) pairs it would report.

namespace oracle {

struct ClassicDetection {
  std::string label;
  double x = 0.0, y = 0.0;
  double score = 0.0;
};

struct ClassicFrame {
  std::int64_t index = 0;
  std::vector<ClassicDetection> dets;
};

struct ClassicParams {
  int max_age = 3;
  int min_hits = 1;
  double gate = 2.0;
};

inline std::set<std::pair<std::int64_t, std::int64_t>> classic_track(const std::vector<ClassicFrame>& frames,
                                                                     const ClassicParams& p) {
  struct Track {
    std::int64_t id;
    std::string label;
    double px, py;      // predicted center
    double lx, ly;      // last matched center
    double vx = 0, vy = 0;
    std::int64_t last_frame;
    int hits = 1;
    int misses = 0;
  };

  std::vector<Track> tracks;
  std::int64_t next_id = 1;
  std::int64_t prev_frame = -1;
  bool started = false;
  std::set<std::pair<std::int64_t, std::int64_t>> out;

  for (const ClassicFrame& f : frames) {
    const double dt = started ? static_cast<double>(f.index - prev_frame) : 1.0;
    started = true;
    prev_frame = f.index;
    for (Track& t : tracks) {
      t.px += t.vx * dt;
      t.py += t.vy * dt;
    }

    // Greedy: strongest detection first, each takes its nearest free track.
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < f.dets.size(); ++j) order.push_back(j);
    for (std::size_t a = 1; a < order.size(); ++a) {
      // insertion sort keeps equal scores in index order
      for (std::size_t b = a; b > 0 && f.dets[order[b]].score > f.dets[order[b - 1]].score; --b)
        std::swap(order[b], order[b - 1]);
    }
    std::vector<int> det_track(f.dets.size(), -1);
    std::vector<bool> taken(tracks.size(), false);
    for (std::size_t j : order) {
      const ClassicDetection& d = f.dets[j];
      int best = -1;
      double best_d = 0.0;
      for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (taken[i] || tracks[i].label != d.label) continue;
        const double dist = std::sqrt((tracks[i].px - d.x) * (tracks[i].px - d.x) +
                                      (tracks[i].py - d.y) * (tracks[i].py - d.y));
        if (dist > p.gate) continue;
        if (best < 0 || dist < best_d) {
          best = static_cast<int>(i);
          best_d = dist;
        }
      }
      if (best >= 0) {
        taken[best] = true;
        det_track[j] = best;
      }
    }

    std::vector<Track> next;
    for (std::size_t j = 0; j < f.dets.size(); ++j) {
      if (det_track[j] < 0) continue;
      Track& t = tracks[det_track[j]];
      const double gap = static_cast<double>(f.index - t.last_frame);
      t.vx = (f.dets[j].x - t.lx) / gap;
      t.vy = (f.dets[j].y - t.ly) / gap;
      t.px = t.lx = f.dets[j].x;
      t.py = t.ly = f.dets[j].y;
      t.last_frame = f.index;
      t.hits += 1;
      t.misses = 0;
    }
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      if (taken[i]) {
        next.push_back(tracks[i]);
      } else if (++tracks[i].misses <= p.max_age) {
        next.push_back(tracks[i]);
      }
    }
    for (std::size_t j = 0; j < f.dets.size(); ++j) {
      if (det_track[j] >= 0) continue;
      const ClassicDetection& d = f.dets[j];
      next.push_back(Track{next_id++, d.label, d.x, d.y, d.x, d.y, 0.0, 0.0, f.index, 1, 0});
    }
    tracks = std::move(next);
    for (const Track& t : tracks)
      if (t.hits >= p.min_hits) out.insert({t.id, f.index});
  }
  return out;
}

}  // namespace oracle
