#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <span>
#include <thread>
#include <variant>
#include <vector>

#include "confmot/assignment.hpp"
#include "confmot/domain.hpp"
#include "confmot/lifecycle.hpp"
#include "confmot/motion.hpp"
#include "confmot/score.hpp"

namespace confmot {

/// A live tracklet: lifecycle status plus the filter that owns its kinematics.
struct Tracklet {
  TrackletStatus status;
  std::variant<PointTrackerState, KalmanState> motion;
  std::int64_t last_match_frame = 0;

  double x() const {
    return std::visit([](const auto& m) { return position_of(m).x(); }, motion);
  }
  double y() const {
    return std::visit([](const auto& m) { return position_of(m).y(); }, motion);
  }
  const PassThrough& pose() const {
    return std::visit([](const auto& m) -> const PassThrough& { return m.pose; }, motion);
  }

 private:
  static Eigen::Vector2d position_of(const PointTrackerState& s) { return s.position; }
  static Eigen::Vector2d position_of(const KalmanState& s) { return predicted_measurement(s); }
};

/// Frame-by-frame tracking-by-detection for one sequence:
/// predict and decay, associate per class, fuse scores and update filters,
/// spawn tracklets for unmatched detections, run the death module, and emit
/// the active tracklets.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)), meas_noise_(measurement_noise(cfg_.kalman)) {
    validate_config(cfg_);
  }

  const TrackerConfig& config() const noexcept { return cfg_; }
  const std::vector<Tracklet>& tracklets() const noexcept { return tracklets_; }

  FrameOutput step(std::int64_t frame_index, std::span<const Detection> raw_detections) {
    if (last_frame_ && frame_index <= *last_frame_) {
      throw Error(ErrorKind::OutOfOrderFrame, "frame " + std::to_string(frame_index) +
                                                  " does not follow frame " + std::to_string(*last_frame_));
    }
    std::vector<Detection> detections;
    detections.reserve(raw_detections.size());
    for (const Detection& d : raw_detections) {
      if (d.frame_index != frame_index) {
        throw Error(ErrorKind::OutOfOrderFrame, "detection frame index differs from the frame being stepped");
      }
      detections.push_back(validate_detection(d));
    }
    const double dt = last_frame_ ? static_cast<double>(frame_index - *last_frame_) : 1.0;
    last_frame_ = frame_index;

    predict(dt);

    std::vector<std::optional<std::size_t>> det_to_track(detections.size());
    std::vector<bool> track_matched(tracklets_.size(), false);
    associate(detections, det_to_track, track_matched);

    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (!det_to_track[j]) continue;
      Tracklet& t = tracklets_[*det_to_track[j]];
      update_motion(t, detections[j], frame_index);
      const double fused = score::refine_on_match(t.status.score, detections[j].score, cfg_);
      t.status = lifecycle::on_match(t.status, fused, cfg_);
      t.last_match_frame = frame_index;
    }

    std::vector<Tracklet> survivors;
    survivors.reserve(tracklets_.size() + detections.size());
    for (std::size_t i = 0; i < tracklets_.size(); ++i) {
      if (track_matched[i]) {
        survivors.push_back(std::move(tracklets_[i]));
        continue;
      }
      if (auto kept = lifecycle::on_miss(tracklets_[i].status, cfg_)) {
        tracklets_[i].status = std::move(*kept);
        survivors.push_back(std::move(tracklets_[i]));
      }
    }
    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (det_to_track[j]) continue;
      survivors.push_back(spawn(detections[j]));
    }
    tracklets_ = std::move(survivors);

    return emit(frame_index);
  }

 private:
  void predict(double dt) {
    for (Tracklet& t : tracklets_) {
      if (auto* pt = std::get_if<PointTrackerState>(&t.motion)) {
        *pt = pt_predict(std::move(*pt), dt);
      } else {
        auto& kf = std::get<KalmanState>(t.motion);
        kf = kf_predict(std::move(kf), dt, white_jerk_noise(dt, cfg_.kalman.jerk_sigma));
      }
      t.status.score = score::decay_score(t.status.score, cfg_.score_decay);
      t.status.age += static_cast<int>(dt);
    }
  }

  double pair_cost(const Tracklet& t, const Detection& d) const {
    switch (cfg_.metric) {
      case CostMetric::euclidean_2d:
        return euclidean_cost(t.x(), t.y(), 0.0, d.cx, d.cy, 0.0, Dims::two);
      case CostMetric::euclidean_3d:
        return euclidean_cost(t.x(), t.y(), t.pose().z, d.cx, d.cy, d.cz, Dims::three);
      case CostMetric::mahalanobis: {
        const auto& kf = std::get<KalmanState>(t.motion);
        const Eigen::Vector2d residual = Eigen::Vector2d(d.cx, d.cy) - predicted_measurement(kf);
        return mahalanobis_cost(residual, innovation_covariance(kf, meas_noise_));
      }
    }
    return kInf;
  }

  void associate(const std::vector<Detection>& detections, std::vector<std::optional<std::size_t>>& det_to_track,
                 std::vector<bool>& track_matched) const {
    // Classes never mix; each label gets its own cost matrix.
    std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_class;
    for (std::size_t i = 0; i < tracklets_.size(); ++i) by_class[tracklets_[i].status.class_label].first.push_back(i);
    for (std::size_t j = 0; j < detections.size(); ++j) by_class[detections[j].class_label].second.push_back(j);

    for (const auto& [label, members] : by_class) {
      const auto& [rows, cols] = members;
      if (rows.empty() || cols.empty()) continue;
      CostMatrix costs(rows.size(), cols.size());
      std::vector<double> scores(cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c) {
        scores[c] = detections[cols[c]].score;
        for (std::size_t r = 0; r < rows.size(); ++r) costs(r, c) = pair_cost(tracklets_[rows[r]], detections[cols[c]]);
      }
      costs.apply_gate(cfg_.gate);
      const AssignmentResult result = assign(cfg_.matcher, costs, scores);
      for (const Match& m : result.matches) {
        det_to_track[cols[m.col]] = rows[m.row];
        track_matched[rows[m.row]] = true;
      }
    }
  }

  void update_motion(Tracklet& t, const Detection& d, std::int64_t frame_index) const {
    if (auto* pt = std::get_if<PointTrackerState>(&t.motion)) {
      const double since = static_cast<double>(frame_index - t.last_match_frame);
      *pt = pt_update(std::move(*pt), d, since);
    } else {
      auto& kf = std::get<KalmanState>(t.motion);
      kf = kf_update(std::move(kf), d, meas_noise_);
    }
  }

  Tracklet spawn(const Detection& d) {
    Tracklet t;
    t.status = lifecycle::birth(d, next_id_++, cfg_);
    t.last_match_frame = d.frame_index;
    if (cfg_.filter_kind == FilterKind::point_tracker) {
      t.motion = pt_init(d);
    } else {
      t.motion = kf_init(d, cfg_.kalman);
    }
    return t;
  }

  FrameOutput emit(std::int64_t frame_index) const {
    FrameOutput out;
    out.frame_index = frame_index;
    for (const Tracklet& t : tracklets_) {
      if (!t.status.active) continue;
      const PassThrough& pose = t.pose();
      out.records.push_back(TrackRecord{frame_index, t.status.id, t.status.class_label, t.x(), t.y(), pose.z,
                                        pose.extent, pose.yaw, score::clamp_unit(t.status.score), true});
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const TrackRecord& a, const TrackRecord& b) { return a.track_id < b.track_id; });
    return out;
  }

  TrackerConfig cfg_;
  Eigen::Matrix2d meas_noise_;
  std::vector<Tracklet> tracklets_;
  TrackId next_id_ = 1;
  std::optional<std::int64_t> last_frame_;
};

/// Folds Tracker::step over an ordered stream starting from an empty state.
inline std::vector<FrameOutput> run_sequence(const TrackerConfig& cfg, std::span<const DetectionFrame> frames) {
  Tracker tracker(cfg);
  std::vector<FrameOutput> out;
  out.reserve(frames.size());
  for (const DetectionFrame& f : frames) out.push_back(tracker.step(f.frame_index, f.detections));
  return out;
}

/// Runs `job(i)` for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
template <typename Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<TrackSequence> run_sequences(const TrackerConfig& cfg, std::span<const DetectionSequence> seqs,
                                                unsigned threads = 1) {
  validate_config(cfg);
  std::vector<TrackSequence> out(seqs.size());
  parallel_for(seqs.size(), threads, [&](std::size_t i) {
    out[i].name = seqs[i].name;
    out[i].frames = run_sequence(cfg, seqs[i].frames);
  });
  return out;
}

}  // namespace confmot
