#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "confmot/domain.hpp"
#include "confmot/ensemble.hpp"
#include "confmot/keyvalue.hpp"
#include "confmot/synth.hpp"

namespace confmot::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Enum vocabulary
// ---------------------------------------------------------------------------

template <typename E>
struct EnumNames;

template <>
struct EnumNames<UpdateFn> {
  static constexpr std::pair<UpdateFn, const char*> table[] = {
      {UpdateFn::overwrite, "overwrite"},
      {UpdateFn::add, "add"},
      {UpdateFn::max, "max"},
      {UpdateFn::complement_mult, "complement_mult"},
      {UpdateFn::complement_parallel, "complement_parallel"}};
};
template <>
struct EnumNames<Matcher> {
  static constexpr std::pair<Matcher, const char*> table[] = {{Matcher::greedy, "greedy"},
                                                              {Matcher::hungarian, "hungarian"}};
};
template <>
struct EnumNames<CostMetric> {
  static constexpr std::pair<CostMetric, const char*> table[] = {{CostMetric::euclidean_2d, "euclidean_2d"},
                                                                 {CostMetric::euclidean_3d, "euclidean_3d"},
                                                                 {CostMetric::mahalanobis, "mahalanobis"}};
};
template <>
struct EnumNames<FilterKind> {
  static constexpr std::pair<FilterKind, const char*> table[] = {{FilterKind::point_tracker, "point_tracker"},
                                                                 {FilterKind::kalman_cvca, "kalman_cvca"}};
};
template <>
struct EnumNames<LifecycleMode> {
  static constexpr std::pair<LifecycleMode, const char*> table[] = {
      {LifecycleMode::count_based, "count_based"},
      {LifecycleMode::confidence_based, "confidence_based"},
      {LifecycleMode::mixed, "mixed"}};
};
template <>
struct EnumNames<ensemble::Strategy> {
  static constexpr std::pair<ensemble::Strategy, const char*> table[] = {
      {ensemble::Strategy::affirmative, "affirmative"},
      {ensemble::Strategy::unanimous, "unanimous"},
      {ensemble::Strategy::confidence, "confidence"}};
};
template <>
struct EnumNames<ensemble::DecayPolicy> {
  static constexpr std::pair<ensemble::DecayPolicy, const char*> table[] = {
      {ensemble::DecayPolicy::decay_a, "decay_a"},
      {ensemble::DecayPolicy::decay_b, "decay_b"},
      {ensemble::DecayPolicy::decay_both, "decay_both"},
      {ensemble::DecayPolicy::decay_both_if_unmatched, "decay_both_if_unmatched"}};
};
template <>
struct EnumNames<synth::Layout> {
  static constexpr std::pair<synth::Layout, const char*> table[] = {{synth::Layout::random, "random"},
                                                                    {synth::Layout::crossing, "crossing"}};
};

template <typename E>
std::string enum_name(E value) {
  for (const auto& [v, n] : EnumNames<E>::table)
    if (v == value) return n;
  return "?";
}

template <typename E>
std::optional<E> enum_from(const std::string& name) {
  for (const auto& [v, n] : EnumNames<E>::table)
    if (name == n) return v;
  return std::nullopt;
}

template <typename E>
E enum_value(const kv::Document& doc, const std::string& key, const std::string& text) {
  if (auto v = enum_from<E>(text)) return *v;
  std::string allowed;
  for (const auto& [_, n] : EnumNames<E>::table) allowed += std::string(allowed.empty() ? "" : ", ") + n;
  doc.fail_key(key, "unknown value '" + text + "' for '" + key + "' (expected one of: " + allowed + ")");
}

// ---------------------------------------------------------------------------
// Tracker configuration
// ---------------------------------------------------------------------------

inline const std::set<std::string>& tracker_keys() {
  static const std::set<std::string> keys = {
      "update_fn", "score_decay", "detection_threshold", "deletion_threshold", "active_threshold",
      "max_age", "min_hits", "matcher", "metric", "gate", "filter", "lifecycle",
      "kalman_jerk_sigma", "kalman_meas_var_x", "kalman_meas_var_y", "kalman_init_pos_var",
      "kalman_init_vel_var", "kalman_init_acc_var"};
  return keys;
}

inline std::optional<int> parse_max_age(const kv::Document& doc, const std::string& key, const std::string& text) {
  if (text == "unbounded" || text == "inf") return std::nullopt;
  return static_cast<int>(doc.to_int(text, doc.entry(key).line, key));
}

inline std::string format_max_age(std::optional<int> v) { return v ? std::to_string(*v) : "unbounded"; }

/// Reads the tracker keys present in `doc` on top of `base`. Keys that are
/// not tracker settings are left for the caller.
inline TrackerConfig apply_tracker_keys(const kv::Document& doc, TrackerConfig cfg,
                                        const std::set<std::string>& skip = {}) {
  auto want = [&](const std::string& k) { return doc.has(k) && !skip.contains(k); };
  if (want("update_fn")) cfg.update_fn = enum_value<UpdateFn>(doc, "update_fn", doc.get_string("update_fn"));
  if (want("score_decay")) cfg.score_decay = doc.get_double("score_decay");
  if (want("detection_threshold")) cfg.detection_threshold = doc.get_double("detection_threshold");
  if (want("deletion_threshold")) cfg.deletion_threshold = doc.get_double("deletion_threshold");
  if (want("active_threshold")) cfg.active_threshold = doc.get_double("active_threshold");
  if (want("max_age")) cfg.max_age = parse_max_age(doc, "max_age", doc.get_string("max_age"));
  if (want("min_hits")) cfg.min_hits = static_cast<int>(doc.get_int("min_hits"));
  if (want("matcher")) cfg.matcher = enum_value<Matcher>(doc, "matcher", doc.get_string("matcher"));
  if (want("metric")) cfg.metric = enum_value<CostMetric>(doc, "metric", doc.get_string("metric"));
  if (want("gate")) cfg.gate = doc.get_double("gate");
  if (want("filter")) cfg.filter_kind = enum_value<FilterKind>(doc, "filter", doc.get_string("filter"));
  if (want("lifecycle")) cfg.lifecycle = enum_value<LifecycleMode>(doc, "lifecycle", doc.get_string("lifecycle"));
  if (want("kalman_jerk_sigma")) cfg.kalman.jerk_sigma = doc.get_double("kalman_jerk_sigma");
  if (want("kalman_meas_var_x")) cfg.kalman.meas_var_x = doc.get_double("kalman_meas_var_x");
  if (want("kalman_meas_var_y")) cfg.kalman.meas_var_y = doc.get_double("kalman_meas_var_y");
  if (want("kalman_init_pos_var")) cfg.kalman.init_pos_var = doc.get_double("kalman_init_pos_var");
  if (want("kalman_init_vel_var")) cfg.kalman.init_vel_var = doc.get_double("kalman_init_vel_var");
  if (want("kalman_init_acc_var")) cfg.kalman.init_acc_var = doc.get_double("kalman_init_acc_var");
  return cfg;
}

inline TrackerConfig parse_tracker_config(const kv::Document& doc) {
  doc.require_known(tracker_keys());
  TrackerConfig cfg = apply_tracker_keys(doc, TrackerConfig{});
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, doc.source() + ": " + e.what());
  }
  return cfg;
}

inline TrackerConfig load_tracker_config(const std::string& path) {
  return parse_tracker_config(kv::Document::load(path));
}

inline std::string format_tracker_config(const TrackerConfig& c) {
  std::ostringstream out;
  out << "update_fn = " << enum_name(c.update_fn) << '\n'
      << "score_decay = " << kv::format_double(c.score_decay) << '\n'
      << "detection_threshold = " << kv::format_double(c.detection_threshold) << '\n'
      << "deletion_threshold = " << kv::format_double(c.deletion_threshold) << '\n'
      << "active_threshold = " << kv::format_double(c.active_threshold) << '\n'
      << "max_age = " << format_max_age(c.max_age) << '\n'
      << "min_hits = " << c.min_hits << '\n'
      << "matcher = " << enum_name(c.matcher) << '\n'
      << "metric = " << enum_name(c.metric) << '\n'
      << "gate = " << kv::format_double(c.gate) << '\n'
      << "filter = " << enum_name(c.filter_kind) << '\n'
      << "lifecycle = " << enum_name(c.lifecycle) << '\n'
      << "kalman_jerk_sigma = " << kv::format_double(c.kalman.jerk_sigma) << '\n'
      << "kalman_meas_var_x = " << kv::format_double(c.kalman.meas_var_x) << '\n'
      << "kalman_meas_var_y = " << kv::format_double(c.kalman.meas_var_y) << '\n'
      << "kalman_init_pos_var = " << kv::format_double(c.kalman.init_pos_var) << '\n'
      << "kalman_init_vel_var = " << kv::format_double(c.kalman.init_vel_var) << '\n'
      << "kalman_init_acc_var = " << kv::format_double(c.kalman.init_acc_var) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Ensemble configuration
// ---------------------------------------------------------------------------

inline ensemble::Config parse_ensemble_config(const kv::Document& doc) {
  doc.require_known({"strategy", "decay_policy", "sigma", "cross_gate", "update_fn"});
  ensemble::Config cfg;
  if (doc.has("strategy")) cfg.strategy = enum_value<ensemble::Strategy>(doc, "strategy", doc.get_string("strategy"));
  if (doc.has("decay_policy")) {
    cfg.decay_policy = enum_value<ensemble::DecayPolicy>(doc, "decay_policy", doc.get_string("decay_policy"));
  }
  if (doc.has("sigma")) cfg.sigma = doc.get_double("sigma");
  if (doc.has("cross_gate")) cfg.cross_gate = doc.get_double("cross_gate");
  if (doc.has("update_fn")) cfg.update_fn = enum_value<UpdateFn>(doc, "update_fn", doc.get_string("update_fn"));
  try {
    ensemble::validate(cfg);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, doc.source() + ": " + e.what());
  }
  return cfg;
}

inline std::string format_ensemble_config(const ensemble::Config& c) {
  std::ostringstream out;
  out << "strategy = " << enum_name(c.strategy) << '\n'
      << "decay_policy = " << enum_name(c.decay_policy) << '\n'
      << "sigma = " << kv::format_double(c.sigma) << '\n'
      << "cross_gate = " << kv::format_double(c.cross_gate) << '\n'
      << "update_fn = " << enum_name(c.update_fn) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario spec files
// ---------------------------------------------------------------------------

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

/// Keys mirror ScenarioSpec fields. `classes` entries read "label:l:w:h",
/// `occlusions` entries "object:first:last", score models "[alpha, beta]".
inline synth::ScenarioSpec parse_scenario_spec(const kv::Document& doc) {
  doc.require_known({"name", "seed", "detection_seed", "n_frames", "n_objects", "classes", "layout",
                     "arena_half_size", "speed_min", "speed_max", "yaw_rate_max", "crossing_offset",
                     "position_noise_sigma", "dropout_prob", "clutter_rate", "tp_score", "fp_score", "occlusions"});
  synth::ScenarioSpec s;
  auto u64 = [&](const std::string& k) {
    const auto v = doc.get_int(k);
    if (v < 0) doc.fail_key(k, "'" + k + "' must be non-negative");
    return static_cast<std::uint64_t>(v);
  };
  if (doc.has("name")) s.name = doc.get_string("name");
  if (doc.has("seed")) s.seed = u64("seed");
  if (doc.has("detection_seed")) s.detection_seed = u64("detection_seed");
  if (doc.has("n_frames")) s.n_frames = static_cast<int>(doc.get_int("n_frames"));
  if (doc.has("n_objects")) s.n_objects = static_cast<int>(doc.get_int("n_objects"));
  if (doc.has("classes")) {
    s.classes.clear();
    const int line = doc.entry("classes").line;
    for (const auto& item : doc.get_list("classes")) {
      const auto parts = split(item, ':');
      if (parts.size() != 4) doc.fail(line, "class entries read 'label:length:width:height'");
      s.classes.push_back({parts[0],
                           {doc.to_double(parts[1], line, "classes"), doc.to_double(parts[2], line, "classes"),
                            doc.to_double(parts[3], line, "classes")}});
    }
  }
  if (doc.has("layout")) s.layout = enum_value<synth::Layout>(doc, "layout", doc.get_string("layout"));
  if (doc.has("arena_half_size")) s.arena_half_size = doc.get_double("arena_half_size");
  if (doc.has("speed_min")) s.speed_min = doc.get_double("speed_min");
  if (doc.has("speed_max")) s.speed_max = doc.get_double("speed_max");
  if (doc.has("yaw_rate_max")) s.yaw_rate_max = doc.get_double("yaw_rate_max");
  if (doc.has("crossing_offset")) s.crossing_offset = doc.get_double("crossing_offset");
  if (doc.has("position_noise_sigma")) s.position_noise_sigma = doc.get_double("position_noise_sigma");
  if (doc.has("dropout_prob")) s.dropout_prob = doc.get_double("dropout_prob");
  if (doc.has("clutter_rate")) s.clutter_rate = doc.get_double("clutter_rate");
  auto beta = [&](const std::string& k) {
    const auto v = doc.get_double_list(k);
    if (v.size() != 2) doc.fail_key(k, "'" + k + "' expects [alpha, beta]");
    return synth::BetaParams{v[0], v[1]};
  };
  if (doc.has("tp_score")) s.tp_score = beta("tp_score");
  if (doc.has("fp_score")) s.fp_score = beta("fp_score");
  if (doc.has("occlusions")) {
    const int line = doc.entry("occlusions").line;
    for (const auto& item : doc.get_list("occlusions")) {
      const auto parts = split(item, ':');
      if (parts.size() != 3) doc.fail(line, "occlusion entries read 'object:first:last'");
      s.occlusions.push_back({static_cast<int>(doc.to_int(parts[0], line, "occlusions")),
                              doc.to_int(parts[1], line, "occlusions"), doc.to_int(parts[2], line, "occlusions")});
    }
  }
  synth::validate(s);
  return s;
}

// ---------------------------------------------------------------------------
// Ablation grid
// ---------------------------------------------------------------------------

struct GridCell {
  UpdateFn update_fn;
  double score_decay;
  std::optional<int> max_age;
  TrackerConfig config;
};

/// A grid file holds the tracker keys; `update_fn`, `score_decay` and
/// `max_age` may be arrays and span the grid (update_fn outermost).
inline std::vector<GridCell> parse_grid(const kv::Document& doc) {
  doc.require_known(tracker_keys());
  const std::set<std::string> axes = {"update_fn", "score_decay", "max_age"};
  const TrackerConfig base = apply_tracker_keys(doc, TrackerConfig{}, axes);

  std::vector<UpdateFn> fns = {base.update_fn};
  std::vector<double> decays = {base.score_decay};
  std::vector<std::optional<int>> ages = {base.max_age};
  if (doc.has("update_fn")) {
    fns.clear();
    for (const auto& v : doc.get_list("update_fn")) fns.push_back(enum_value<UpdateFn>(doc, "update_fn", v));
  }
  if (doc.has("score_decay")) decays = doc.get_double_list("score_decay");
  if (doc.has("max_age")) {
    ages.clear();
    for (const auto& v : doc.get_list("max_age")) ages.push_back(parse_max_age(doc, "max_age", v));
  }

  std::vector<GridCell> cells;
  for (UpdateFn fn : fns) {
    for (double d : decays) {
      for (const auto& age : ages) {
        TrackerConfig c = base;
        c.update_fn = fn;
        c.score_decay = d;
        c.max_age = age;
        try {
          validate_config(c);
        } catch (const Error& e) {
          throw Error(ErrorKind::ConfigError, doc.source() + ": " + e.what());
        }
        cells.push_back({fn, d, age, c});
      }
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Line-delimited record files
// ---------------------------------------------------------------------------

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kDetectionFormat = "confmot.detections";
inline constexpr const char* kGtFormat = "confmot.groundtruth";
inline constexpr const char* kTrackFormat = "confmot.tracks";

namespace detail {

struct LineReader {
  std::string path;
  std::ifstream in;
  int line_no = 0;

  explicit LineReader(std::string p) : path(std::move(p)), in(path) {
    if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, path + ":" + std::to_string(line_no) + ": " + msg);
  }

  /// Next non-blank line parsed as a JSON object; false at end of file.
  bool next(json& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out = json::parse(line);
      } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
      }
      if (!out.is_object()) fail("expected a JSON object");
      return true;
    }
    return false;
  }

  double number(const json& j, const char* key) const {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) fail(std::string("missing numeric field '") + key + "'");
    const double v = it->get<double>();
    if (!std::isfinite(v)) fail(std::string("non-finite field '") + key + "'");
    return v;
  }

  std::int64_t integer(const json& j, const char* key) const {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) fail(std::string("missing integer field '") + key + "'");
    return it->get<std::int64_t>();
  }

  std::string string(const json& j, const char* key) const {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) fail(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
  }

  bool boolean(const json& j, const char* key) const {
    auto it = j.find(key);
    if (it == j.end() || !it->is_boolean()) fail(std::string("missing boolean field '") + key + "'");
    return it->get<bool>();
  }

  std::string sequence(const json& j) const {
    auto it = j.find("sequence");
    if (it == j.end()) return {};
    if (!it->is_string()) fail("'sequence' must be a string");
    return it->get<std::string>();
  }
};

/// Header: {"format": ..., "version": 1, "sequences": [{"name": .., "frames": N}]}.
/// Declared sequences span frames [0, N) even where no record appears.
inline std::vector<std::pair<std::string, std::int64_t>> read_header(LineReader& r, const char* format) {
  json header;
  if (!r.next(header)) r.fail("missing header line");
  if (header.value("format", std::string{}) != format) r.fail(std::string("expected format '") + format + "'");
  if (!header.contains("version") || !header["version"].is_number_integer() ||
      header["version"].get<int>() != kFormatVersion) {
    r.fail("unsupported format version");
  }
  std::vector<std::pair<std::string, std::int64_t>> declared;
  if (auto it = header.find("sequences"); it != header.end()) {
    if (!it->is_array()) r.fail("'sequences' must be an array");
    for (const auto& s : *it) {
      if (!s.is_object()) r.fail("'sequences' entries must be objects");
      const std::string name = r.string(s, "name");
      const std::int64_t frames = r.integer(s, "frames");
      if (frames < 0) r.fail("negative frame count");
      declared.emplace_back(name, frames);
    }
  }
  return declared;
}

template <typename Frame>
json header_for(const char* format, const std::vector<Sequence<Frame>>& seqs) {
  json seq_list = json::array();
  for (const auto& s : seqs) {
    std::int64_t frames = 0;
    for (const auto& f : s.frames) frames = std::max(frames, f.frame_index + 1);
    seq_list.push_back({{"name", s.name}, {"frames", frames}});
  }
  return {{"format", format}, {"version", kFormatVersion}, {"sequences", seq_list}};
}

/// Collects records into sequences, enforcing non-decreasing frames per
/// sequence, then fills frame gaps with empty frames.
template <typename Frame, typename Record, typename Push>
std::vector<Sequence<Frame>> assemble(LineReader& r, const std::vector<std::pair<std::string, std::int64_t>>& declared,
                                      std::vector<std::pair<std::string, Record>>&& records, std::vector<int>&& lines,
                                      Push push) {
  std::vector<std::string> order;
  std::map<std::string, std::int64_t> span;
  for (const auto& [name, frames] : declared) {
    if (!span.contains(name)) order.push_back(name);
    span[name] = std::max(span[name], frames);
  }
  std::map<std::string, std::map<std::int64_t, Frame>> frames;
  std::map<std::string, std::int64_t> last;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& [name, rec] = records[i];
    const std::int64_t f = rec.frame_index;
    r.line_no = lines[i];
    if (f < 0) r.fail("negative frame index");
    if (auto it = last.find(name); it != last.end() && f < it->second) r.fail("frames must be non-decreasing");
    last[name] = f;
    if (!span.contains(name)) {
      order.push_back(name);
      span[name] = 0;
    }
    span[name] = std::max(span[name], f + 1);
    auto& frame = frames[name][f];
    frame.frame_index = f;
    push(frame, std::move(rec));
  }
  std::vector<Sequence<Frame>> out;
  for (const auto& name : order) {
    Sequence<Frame> seq;
    seq.name = name;
    auto& by_index = frames[name];
    for (std::int64_t f = 0; f < span[name]; ++f) {
      auto it = by_index.find(f);
      if (it != by_index.end()) {
        seq.frames.push_back(std::move(it->second));
      } else {
        Frame empty{};
        empty.frame_index = f;
        seq.frames.push_back(std::move(empty));
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

inline void with_sequence(json& j, const std::string& name) {
  if (!name.empty()) j["sequence"] = name;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

}  // namespace detail

// Detections ----------------------------------------------------------------

inline json to_json(const Detection& d) {
  return {{"frame", d.frame_index}, {"class", d.class_label}, {"x", d.cx},   {"y", d.cy},
          {"z", d.cz},              {"l", d.extent.length},  {"w", d.extent.width}, {"h", d.extent.height},
          {"yaw", d.yaw},           {"score", d.score}};
}

inline std::string format_detections(const std::vector<DetectionSequence>& seqs) {
  std::string out = detail::header_for(kDetectionFormat, seqs).dump() + "\n";
  for (const auto& s : seqs)
    for (const auto& f : s.frames)
      for (const auto& d : f.detections) {
        json j = to_json(d);
        detail::with_sequence(j, s.name);
        out += j.dump() + "\n";
      }
  return out;
}

inline void write_detections(const std::string& path, const std::vector<DetectionSequence>& seqs) {
  auto out = detail::open_out(path);
  out << format_detections(seqs);
  detail::finish(out, path);
}

inline std::vector<DetectionSequence> read_detections(const std::string& path) {
  detail::LineReader r(path);
  const auto declared = detail::read_header(r, kDetectionFormat);
  std::vector<std::pair<std::string, Detection>> records;
  std::vector<int> lines;
  json j;
  while (r.next(j)) {
    Detection d;
    d.frame_index = r.integer(j, "frame");
    d.class_label = r.string(j, "class");
    d.cx = r.number(j, "x");
    d.cy = r.number(j, "y");
    d.cz = r.number(j, "z");
    d.extent = {r.number(j, "l"), r.number(j, "w"), r.number(j, "h")};
    d.yaw = r.number(j, "yaw");
    d.score = r.number(j, "score");
    try {
      d = validate_detection(d);
    } catch (const Error& e) {
      r.fail(e.what());
    }
    records.emplace_back(r.sequence(j), std::move(d));
    lines.push_back(r.line_no);
  }
  return detail::assemble<DetectionFrame>(r, declared, std::move(records), std::move(lines),
                                          [](DetectionFrame& f, Detection&& d) { f.detections.push_back(std::move(d)); });
}

// Ground truth --------------------------------------------------------------

inline json to_json(const GtAnnotation& g) {
  return {{"frame", g.frame_index}, {"instance_id", g.instance_id}, {"class", g.class_label},
          {"x", g.x},               {"y", g.y},                     {"z", g.z},
          {"l", g.extent.length},   {"w", g.extent.width},          {"h", g.extent.height},
          {"yaw", g.yaw}};
}

inline std::string format_groundtruth(const std::vector<GtSequence>& seqs) {
  std::string out = detail::header_for(kGtFormat, seqs).dump() + "\n";
  for (const auto& s : seqs)
    for (const auto& f : s.frames)
      for (const auto& g : f.objects) {
        json j = to_json(g);
        detail::with_sequence(j, s.name);
        out += j.dump() + "\n";
      }
  return out;
}

inline void write_groundtruth(const std::string& path, const std::vector<GtSequence>& seqs) {
  auto out = detail::open_out(path);
  out << format_groundtruth(seqs);
  detail::finish(out, path);
}

inline std::vector<GtSequence> read_groundtruth(const std::string& path) {
  detail::LineReader r(path);
  const auto declared = detail::read_header(r, kGtFormat);
  std::vector<std::pair<std::string, GtAnnotation>> records;
  std::vector<int> lines;
  json j;
  while (r.next(j)) {
    GtAnnotation g;
    g.frame_index = r.integer(j, "frame");
    g.instance_id = r.integer(j, "instance_id");
    g.class_label = r.string(j, "class");
    g.x = r.number(j, "x");
    g.y = r.number(j, "y");
    g.z = r.number(j, "z");
    g.extent = {r.number(j, "l"), r.number(j, "w"), r.number(j, "h")};
    g.yaw = r.number(j, "yaw");
    records.emplace_back(r.sequence(j), std::move(g));
    lines.push_back(r.line_no);
  }
  return detail::assemble<GtFrame>(r, declared, std::move(records), std::move(lines),
                                   [](GtFrame& f, GtAnnotation&& g) { f.objects.push_back(std::move(g)); });
}

// Tracks --------------------------------------------------------------------

inline json to_json(const TrackRecord& t) {
  return {{"frame", t.frame_index}, {"track_id", t.track_id}, {"class", t.class_label},
          {"x", t.x},               {"y", t.y},                {"z", t.z},
          {"l", t.extent.length},   {"w", t.extent.width},     {"h", t.extent.height},
          {"yaw", t.yaw},           {"score", t.score},        {"active", t.active}};
}

inline std::string format_tracks(const std::vector<TrackSequence>& seqs) {
  std::string out = detail::header_for(kTrackFormat, seqs).dump() + "\n";
  for (const auto& s : seqs)
    for (const auto& f : s.frames)
      for (const auto& t : f.records) {
        json j = to_json(t);
        detail::with_sequence(j, s.name);
        out += j.dump() + "\n";
      }
  return out;
}

inline void write_tracks(const std::string& path, const std::vector<TrackSequence>& seqs) {
  auto out = detail::open_out(path);
  out << format_tracks(seqs);
  detail::finish(out, path);
}

inline std::vector<TrackSequence> read_tracks(const std::string& path) {
  detail::LineReader r(path);
  const auto declared = detail::read_header(r, kTrackFormat);
  std::vector<std::pair<std::string, TrackRecord>> records;
  std::vector<int> lines;
  json j;
  while (r.next(j)) {
    TrackRecord t;
    t.frame_index = r.integer(j, "frame");
    t.track_id = r.integer(j, "track_id");
    t.class_label = r.string(j, "class");
    t.x = r.number(j, "x");
    t.y = r.number(j, "y");
    t.z = r.number(j, "z");
    t.extent = {r.number(j, "l"), r.number(j, "w"), r.number(j, "h")};
    t.yaw = r.number(j, "yaw");
    t.score = r.number(j, "score");
    t.active = r.boolean(j, "active");
    if (t.score < 0.0 || t.score > 1.0) r.fail("score outside [0,1]");
    records.emplace_back(r.sequence(j), std::move(t));
    lines.push_back(r.line_no);
  }
  return detail::assemble<FrameOutput>(r, declared, std::move(records), std::move(lines),
                                       [](FrameOutput& f, TrackRecord&& t) { f.records.push_back(std::move(t)); });
}

}  // namespace confmot::io
