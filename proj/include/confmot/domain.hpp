#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace confmot {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  NonFiniteField,
  NonPositiveExtent,
  ScoreOutOfRange,
  SingularCovariance,
  OutOfOrderFrame,
  FrameMismatch,
  ZeroGroundTruth,
  RecallOutOfRange,
  InvalidSpec,
  ConfigError,
  ParseError,
  IoFailure,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::NonPositiveExtent: return "NonPositiveExtent";
    case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::OutOfOrderFrame: return "OutOfOrderFrame";
    case ErrorKind::FrameMismatch: return "FrameMismatch";
    case ErrorKind::ZeroGroundTruth: return "ZeroGroundTruth";
    case ErrorKind::RecallOutOfRange: return "RecallOutOfRange";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool is_io() const noexcept { return kind_ == ErrorKind::IoFailure; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

/// Maps any finite angle into (-pi, pi].
inline double normalize_yaw(double yaw) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(yaw, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

struct Extent {
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

struct Detection {
  std::int64_t frame_index = 0;
  std::string class_label;
  double cx = 0.0, cy = 0.0, cz = 0.0;
  Extent extent;
  double yaw = 0.0;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Returns the detection with yaw normalized; throws on non-finite fields,
/// degenerate boxes or scores outside [0, 1].
inline Detection validate_detection(Detection d) {
  const double fields[] = {d.cx, d.cy, d.cz, d.extent.length, d.extent.width,
                           d.extent.height, d.yaw, d.score};
  for (double v : fields) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteField, "detection has a NaN or infinite field");
  }
  if (d.frame_index < 0) throw Error(ErrorKind::NonFiniteField, "negative frame index");
  if (d.extent.length <= 0.0 || d.extent.width <= 0.0 || d.extent.height <= 0.0) {
    throw Error(ErrorKind::NonPositiveExtent, "box extent must be strictly positive");
  }
  if (d.score < 0.0 || d.score > 1.0) {
    throw Error(ErrorKind::ScoreOutOfRange, "score " + std::to_string(d.score) + " outside [0,1]");
  }
  d.yaw = normalize_yaw(d.yaw);
  return d;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class UpdateFn { overwrite, add, max, complement_mult, complement_parallel };
enum class Matcher { greedy, hungarian };
enum class CostMetric { euclidean_2d, euclidean_3d, mahalanobis };
enum class FilterKind { point_tracker, kalman_cvca };
enum class LifecycleMode { count_based, confidence_based, mixed };

/// Process and measurement noise for the constant-acceleration Kalman filter.
struct KalmanNoise {
  double jerk_sigma = 1.0;        // m / frame^3
  double meas_var_x = 0.25;       // m^2
  double meas_var_y = 0.25;       // m^2
  double init_pos_var = 1.0;
  double init_vel_var = 10.0;
  double init_acc_var = 10.0;

  friend bool operator==(const KalmanNoise&, const KalmanNoise&) = default;
};

struct TrackerConfig {
  UpdateFn update_fn = UpdateFn::overwrite;
  double score_decay = 0.0;
  double detection_threshold = 0.0;
  double deletion_threshold = 0.0;
  double active_threshold = 1.0;
  std::optional<int> max_age = 3;  // nullopt == unbounded
  int min_hits = 1;
  Matcher matcher = Matcher::greedy;
  CostMetric metric = CostMetric::euclidean_2d;
  double gate = 2.0;
  FilterKind filter_kind = FilterKind::point_tracker;
  LifecycleMode lifecycle = LifecycleMode::count_based;
  KalmanNoise kalman;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

inline void validate_config(const TrackerConfig& c) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
  if (!in_unit(c.score_decay)) fail("score_decay must lie in [0,1]");
  if (!in_unit(c.detection_threshold)) fail("detection_threshold must lie in [0,1]");
  if (!in_unit(c.deletion_threshold)) fail("deletion_threshold must lie in [0,1]");
  if (!in_unit(c.active_threshold)) fail("active_threshold must lie in [0,1]");
  if (c.deletion_threshold > c.active_threshold) fail("deletion_threshold must not exceed active_threshold");
  if (c.max_age && *c.max_age < 1) fail("max_age must be positive or unbounded");
  if (c.min_hits < 1) fail("min_hits must be positive");
  if (!(c.gate > 0.0)) fail("gate must be positive");
  if (c.metric == CostMetric::mahalanobis && c.filter_kind != FilterKind::kalman_cvca) {
    fail("mahalanobis metric needs the kalman_cvca filter (the point tracker has no covariance)");
  }
  const KalmanNoise& k = c.kalman;
  if (!(k.jerk_sigma >= 0.0) || !(k.meas_var_x > 0.0) || !(k.meas_var_y > 0.0) ||
      !(k.init_pos_var >= 0.0) || !(k.init_vel_var >= 0.0) || !(k.init_acc_var >= 0.0)) {
    fail("kalman noise parameters must be non-negative (measurement variances positive)");
  }
}

// ---------------------------------------------------------------------------
// Tracklet bookkeeping and association output
// ---------------------------------------------------------------------------

using TrackId = std::int64_t;

/// Lifecycle-visible part of a tracklet. The kinematic state lives with the
/// pipeline, next to this record.
struct TrackletStatus {
  TrackId id = 0;
  std::string class_label;
  double score = 0.0;
  bool active = false;
  int hits = 1;
  int misses = 0;
  int age = 0;

  friend bool operator==(const TrackletStatus&, const TrackletStatus&) = default;
};

struct Match {
  std::size_t row = 0;  // tracklet index
  std::size_t col = 0;  // detection index
  double cost = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Row/column indices refer to the cost matrix handed to the matcher.
struct AssignmentResult {
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_cols;
  std::vector<std::size_t> unmatched_rows;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();


// ---------------------------------------------------------------------------
// Streams
// ---------------------------------------------------------------------------

/// All detections of one frame.
struct DetectionFrame {
  std::int64_t frame_index = 0;
  std::vector<Detection> detections;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

/// One emitted tracklet in one frame; also the track-file record.
struct TrackRecord {
  std::int64_t frame_index = 0;
  TrackId track_id = 0;
  std::string class_label;
  double x = 0.0, y = 0.0, z = 0.0;
  Extent extent;
  double yaw = 0.0;
  double score = 0.0;
  bool active = true;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

struct FrameOutput {
  std::int64_t frame_index = 0;
  std::vector<TrackRecord> records;

  friend bool operator==(const FrameOutput&, const FrameOutput&) = default;
};

struct GtAnnotation {
  std::int64_t frame_index = 0;
  std::int64_t instance_id = 0;
  std::string class_label;
  double x = 0.0, y = 0.0, z = 0.0;
  Extent extent;
  double yaw = 0.0;

  friend bool operator==(const GtAnnotation&, const GtAnnotation&) = default;
};

/// A named, frame-ordered stream. Files may hold several sequences.
template <typename Frame>
struct Sequence {
  std::string name;
  std::vector<Frame> frames;

  friend bool operator==(const Sequence&, const Sequence&) = default;
};

struct GtFrame {
  std::int64_t frame_index = 0;
  std::vector<GtAnnotation> objects;

  friend bool operator==(const GtFrame&, const GtFrame&) = default;
};

using DetectionSequence = Sequence<DetectionFrame>;
using TrackSequence = Sequence<FrameOutput>;
using GtSequence = Sequence<GtFrame>;

}  // namespace confmot
