#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "confmot/domain.hpp"

// CLEAR-style association of tracks to ground truth, and the MOTA / MOTAR /
// AMOTA metric suite computed over a sweep of score thresholds.

namespace confmot::eval {

enum class MotarConvention {
  devkit,  // subtract (1 - r) * GT in the numerator
  paper,   // add (1 - r) * GT, as printed in the original formula
};

struct Options {
  double dist_th = 2.0;
  int recall_points = 40;
  MotarConvention convention = MotarConvention::devkit;
};

struct ClearCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t ids = 0;
  std::int64_t gt = 0;

  ClearCounts& operator+=(const ClearCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    ids += o.ids;
    gt += o.gt;
    return *this;
  }
  double recall() const { return gt > 0 ? static_cast<double>(tp) / static_cast<double>(gt) : 0.0; }

  friend bool operator==(const ClearCounts&, const ClearCounts&) = default;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

inline double mota(std::int64_t fp, std::int64_t fn, std::int64_t ids, std::int64_t gt) {
  if (gt <= 0) throw Error(ErrorKind::ZeroGroundTruth, "MOTA needs at least one ground-truth object");
  return 1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(gt);
}

inline double motar(std::int64_t ids_r, std::int64_t fp_r, std::int64_t fn_r, std::int64_t gt, double r,
                    MotarConvention convention = MotarConvention::devkit) {
  if (gt <= 0) throw Error(ErrorKind::ZeroGroundTruth, "MOTAR needs at least one ground-truth object");
  if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorKind::RecallOutOfRange, "recall must lie in (0,1]");
  const double g = static_cast<double>(gt);
  const double recall_term = (1.0 - r) * g;
  const double errors = static_cast<double>(ids_r + fp_r + fn_r);
  const double numerator = convention == MotarConvention::devkit ? errors - recall_term : errors + recall_term;
  return std::max(0.0, 1.0 - numerator / (r * g));
}

// ---------------------------------------------------------------------------
// Per-class index
// ---------------------------------------------------------------------------

struct GtPoint {
  std::int64_t id = 0;
  double x = 0.0, y = 0.0;
};

struct PredPoint {
  std::int64_t id = 0;
  double x = 0.0, y = 0.0;
  double score = 0.0;
};

struct IndexedFrame {
  std::int64_t frame_index = 0;
  std::vector<GtPoint> gt;
  std::vector<PredPoint> pred;
};

/// One class of one evaluation: frames per sequence, restricted to the label.
struct ClassIndex {
  std::string label;
  std::vector<std::vector<IndexedFrame>> sequences;

  std::int64_t gt_count() const {
    std::int64_t n = 0;
    for (const auto& s : sequences)
      for (const auto& f : s) n += static_cast<std::int64_t>(f.gt.size());
    return n;
  }

  /// Distinct prediction scores, highest first.
  std::vector<double> thresholds() const {
    std::set<double, std::greater<>> distinct;
    for (const auto& s : sequences)
      for (const auto& f : s)
        for (const auto& p : f.pred) distinct.insert(p.score);
    return {distinct.begin(), distinct.end()};
  }
};

/// Groups ground truth and predictions by class. Sequences are paired by
/// name; a prediction sequence without ground truth is ignored. Only active
/// track records are considered.
inline std::vector<ClassIndex> build_index(std::span<const GtSequence> gt, std::span<const TrackSequence> tracks) {
  std::map<std::string, const TrackSequence*> tracks_by_name;
  for (const auto& t : tracks) tracks_by_name[t.name] = &t;

  std::set<std::string> labels;
  for (const auto& s : gt)
    for (const auto& f : s.frames)
      for (const auto& o : f.objects) labels.insert(o.class_label);

  std::vector<ClassIndex> out;
  for (const std::string& label : labels) {
    ClassIndex idx;
    idx.label = label;
    for (const auto& gseq : gt) {
      std::map<std::int64_t, IndexedFrame> frames;
      for (const auto& f : gseq.frames) {
        auto& slot = frames[f.frame_index];
        slot.frame_index = f.frame_index;
        for (const auto& o : f.objects)
          if (o.class_label == label) slot.gt.push_back({o.instance_id, o.x, o.y});
      }
      if (auto it = tracks_by_name.find(gseq.name); it != tracks_by_name.end()) {
        for (const auto& f : it->second->frames) {
          for (const auto& r : f.records) {
            if (!r.active || r.class_label != label) continue;
            auto& slot = frames[f.frame_index];
            slot.frame_index = f.frame_index;
            slot.pred.push_back({r.track_id, r.x, r.y, r.score});
          }
        }
      }
      std::vector<IndexedFrame> ordered;
      ordered.reserve(frames.size());
      for (auto& [_, f] : frames) ordered.push_back(std::move(f));
      idx.sequences.push_back(std::move(ordered));
    }
    out.push_back(std::move(idx));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Association
// ---------------------------------------------------------------------------

struct FrameMatches {
  std::int64_t frame_index = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // (gt id, track id)
  ClearCounts counts;
};

/// Matches predictions with score >= `threshold` to ground truth frame by
/// frame. Pairs from earlier frames are kept while within `dist_th`; the rest
/// are matched greedily by ascending center distance. A switch is counted when
/// a ground-truth object is matched to a track other than its last match.
inline std::vector<FrameMatches> associate_frames(std::span<const IndexedFrame> frames, double threshold,
                                                  double dist_th) {
  std::vector<FrameMatches> out;
  out.reserve(frames.size());
  std::unordered_map<std::int64_t, std::int64_t> last_match;  // gt id -> track id

  std::vector<const PredPoint*> preds;
  std::vector<char> gt_used, pred_used;
  struct Candidate {
    double dist;
    std::size_t g, p;
  };
  std::vector<Candidate> candidates;

  for (const IndexedFrame& frame : frames) {
    FrameMatches fm;
    fm.frame_index = frame.frame_index;
    preds.clear();
    for (const auto& p : frame.pred)
      if (p.score >= threshold) preds.push_back(&p);

    const auto& gts = frame.gt;
    gt_used.assign(gts.size(), 0);
    pred_used.assign(preds.size(), 0);
    auto dist = [&](std::size_t g, std::size_t p) { return std::hypot(gts[g].x - preds[p]->x, gts[g].y - preds[p]->y); };

    for (std::size_t g = 0; g < gts.size(); ++g) {
      auto it = last_match.find(gts[g].id);
      if (it == last_match.end()) continue;
      for (std::size_t p = 0; p < preds.size(); ++p) {
        if (pred_used[p] || preds[p]->id != it->second) continue;
        if (dist(g, p) <= dist_th) {
          gt_used[g] = 1;
          pred_used[p] = 1;
          fm.pairs.emplace_back(gts[g].id, preds[p]->id);
        }
        break;
      }
    }

    candidates.clear();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_used[g]) continue;
      for (std::size_t p = 0; p < preds.size(); ++p) {
        if (pred_used[p]) continue;
        const double d = dist(g, p);
        if (d <= dist_th) candidates.push_back({d, g, p});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
    for (const Candidate& c : candidates) {
      if (gt_used[c.g] || pred_used[c.p]) continue;
      gt_used[c.g] = 1;
      pred_used[c.p] = 1;
      const std::int64_t gid = gts[c.g].id;
      const std::int64_t tid = preds[c.p]->id;
      if (auto it = last_match.find(gid); it != last_match.end() && it->second != tid) ++fm.counts.ids;
      fm.pairs.emplace_back(gid, tid);
    }
    for (const auto& [gid, tid] : fm.pairs) last_match[gid] = tid;

    fm.counts.gt = static_cast<std::int64_t>(gts.size());
    fm.counts.tp = static_cast<std::int64_t>(fm.pairs.size());
    fm.counts.fn = fm.counts.gt - fm.counts.tp;
    fm.counts.fp = static_cast<std::int64_t>(preds.size()) - fm.counts.tp;
    out.push_back(std::move(fm));
  }
  return out;
}

inline ClearCounts count_clear(const ClassIndex& idx, double threshold, double dist_th) {
  ClearCounts total;
  for (const auto& seq : idx.sequences)
    for (const auto& fm : associate_frames(seq, threshold, dist_th)) total += fm.counts;
  return total;
}

// ---------------------------------------------------------------------------
// Threshold sweeps
// ---------------------------------------------------------------------------

/// Association state that does not depend on the score threshold: dense ids
/// and, per frame, the gated (gt, prediction) pairs in greedy visiting order.
/// `counts_at` then reproduces `associate_frames` for any threshold without
/// recomputing distances.
class PreparedClass {
 public:
  PreparedClass(const ClassIndex& idx, double dist_th) : dist_th_(dist_th) {
    for (const auto& seq : idx.sequences) {
      Seq s;
      std::unordered_map<std::int64_t, std::uint32_t> gt_ids, track_ids;
      auto dense = [](auto& m, std::int64_t id) {
        return m.try_emplace(id, static_cast<std::uint32_t>(m.size())).first->second;
      };
      for (const auto& f : seq) {
        Frame fr;
        fr.gt_begin = static_cast<std::uint32_t>(s.gt.size());
        fr.pred_begin = static_cast<std::uint32_t>(s.pred.size());
        fr.cand_begin = static_cast<std::uint32_t>(s.cand.size());
        for (const auto& g : f.gt) s.gt.push_back({dense(gt_ids, g.id), g.x, g.y});
        for (const auto& p : f.pred) s.pred.push_back({dense(track_ids, p.id), p.x, p.y, p.score});
        fr.gt_end = static_cast<std::uint32_t>(s.gt.size());
        fr.pred_end = static_cast<std::uint32_t>(s.pred.size());
        for (std::uint32_t g = fr.gt_begin; g < fr.gt_end; ++g) {
          for (std::uint32_t p = fr.pred_begin; p < fr.pred_end; ++p) {
            const double d = std::hypot(s.gt[g].x - s.pred[p].x, s.gt[g].y - s.pred[p].y);
            if (d <= dist_th) s.cand.push_back({d, g, p});
          }
        }
        std::stable_sort(s.cand.begin() + fr.cand_begin, s.cand.end(),
                         [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
        fr.cand_end = static_cast<std::uint32_t>(s.cand.size());
        s.frames.push_back(fr);
      }
      s.n_gt_ids = gt_ids.size();
      s.n_track_ids = track_ids.size();
      seqs_.push_back(std::move(s));
    }
  }

  ClearCounts counts_at(double threshold) const {
    ClearCounts total;
    for (const Seq& s : seqs_) total += seq_counts(s, threshold);
    return total;
  }

  /// Counts at every threshold in `thresholds` (sorted descending). A
  /// sequence only changes when the threshold crosses one of its own scores,
  /// so each sequence is associated once per distinct score it holds.
  std::vector<ClearCounts> counts_at_all(std::span<const double> thresholds) const {
    std::vector<ClearCounts> out(thresholds.size());
    if (thresholds.empty()) return out;
    std::vector<ClearCounts> delta(thresholds.size());
    ClearCounts base;
    for (const Seq& s : seqs_) {
      std::vector<double> own;
      own.reserve(s.pred.size());
      for (const P& p : s.pred) own.push_back(p.score);
      std::sort(own.begin(), own.end(), std::greater<>());
      own.erase(std::unique(own.begin(), own.end()), own.end());
      ClearCounts prev = seq_counts(s, kInf);
      base += prev;
      std::size_t i = 0;
      for (double th : own) {
        while (thresholds[i] > th) ++i;
        const ClearCounts cur = seq_counts(s, th);
        ClearCounts& d = delta[i];
        d.tp += cur.tp - prev.tp;
        d.fp += cur.fp - prev.fp;
        d.fn += cur.fn - prev.fn;
        d.ids += cur.ids - prev.ids;
        prev = cur;
      }
    }
    ClearCounts running = base;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      running += delta[i];
      out[i] = running;
    }
    return out;
  }

 private:
  struct Seq;

  ClearCounts seq_counts(const Seq& s, double threshold) const {
    ClearCounts total;
    {
      std::vector<std::int64_t> last(s.n_gt_ids, -1);
      std::vector<std::int64_t> first_pred(s.n_track_ids, -1);
      std::vector<char> gt_used(s.gt.size(), 0), pred_used(s.pred.size(), 0);
      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
      for (const Frame& fr : s.frames) {
        std::int64_t n_pred = 0;
        for (std::uint32_t p = fr.pred_end; p-- > fr.pred_begin;) {
          if (s.pred[p].score < threshold) continue;
          ++n_pred;
          first_pred[s.pred[p].id] = p;
        }
        pairs.clear();
        std::int64_t switches = 0;

        for (std::uint32_t g = fr.gt_begin; g < fr.gt_end; ++g) {
          const std::int64_t prev = last[s.gt[g].id];
          if (prev < 0) continue;
          std::int64_t p = first_pred[prev];
          if (p < 0) continue;
          if (pred_used[p]) {
            // Duplicate track ids within a frame: take the next unused one.
            p = -1;
            for (std::uint32_t q = fr.pred_begin; q < fr.pred_end; ++q) {
              if (s.pred[q].score >= threshold && !pred_used[q] && s.pred[q].id == prev) {
                p = q;
                break;
              }
            }
            if (p < 0) continue;
          }
          if (std::hypot(s.gt[g].x - s.pred[p].x, s.gt[g].y - s.pred[p].y) <= dist_th_) {
            gt_used[g] = 1;
            pred_used[p] = 1;
            pairs.emplace_back(g, static_cast<std::uint32_t>(p));
          }
        }
        for (std::uint32_t c = fr.cand_begin; c < fr.cand_end; ++c) {
          const Cand& k = s.cand[c];
          if (gt_used[k.g] || pred_used[k.p] || s.pred[k.p].score < threshold) continue;
          gt_used[k.g] = 1;
          pred_used[k.p] = 1;
          const std::int64_t prev = last[s.gt[k.g].id];
          if (prev >= 0 && prev != s.pred[k.p].id) ++switches;
          pairs.emplace_back(k.g, k.p);
        }
        for (const auto& [g, p] : pairs) last[s.gt[g].id] = s.pred[p].id;
        for (std::uint32_t p = fr.pred_begin; p < fr.pred_end; ++p) first_pred[s.pred[p].id] = -1;

        const auto n_gt = static_cast<std::int64_t>(fr.gt_end - fr.gt_begin);
        const auto tp = static_cast<std::int64_t>(pairs.size());
        total.gt += n_gt;
        total.tp += tp;
        total.fn += n_gt - tp;
        total.fp += n_pred - tp;
        total.ids += switches;
      }
    }
    return total;
  }

  struct G {
    std::uint32_t id;
    double x, y;
  };
  struct P {
    std::uint32_t id;
    double x, y, score;
  };
  struct Cand {
    double dist;
    std::uint32_t g, p;
  };
  struct Frame {
    std::uint32_t gt_begin, gt_end, pred_begin, pred_end, cand_begin, cand_end;
  };
  struct Seq {
    std::vector<G> gt;
    std::vector<P> pred;
    std::vector<Cand> cand;
    std::vector<Frame> frames;
    std::size_t n_gt_ids = 0, n_track_ids = 0;
  };

  double dist_th_;
  std::vector<Seq> seqs_;
};

/// CLEAR counts at every distinct prediction score, highest threshold first.
struct ThresholdTable {
  std::int64_t gt = 0;
  std::vector<double> thresholds;
  std::vector<ClearCounts> counts;
  ClearCounts empty;  // nothing above threshold

  static ThresholdTable build(const ClassIndex& idx, double dist_th) {
    ThresholdTable t;
    t.gt = idx.gt_count();
    t.thresholds = idx.thresholds();
    const PreparedClass prep(idx, dist_th);
    t.counts = prep.counts_at_all(t.thresholds);
    t.empty = prep.counts_at(kInf);
    return t;
  }
};

struct SweepPoint {
  double recall_target = 0.0;
  std::optional<double> threshold;  // nullopt when the recall is unreachable
  ClearCounts counts;
  double motar = 0.0;
};

/// For each target recall k/(n-1), k = 1..n-1, picks the highest score
/// threshold whose filtered predictions reach that recall and evaluates MOTAR
/// at the recall actually achieved there. Unreachable targets contribute zero.
inline std::vector<SweepPoint> recall_sweep(const ThresholdTable& table, int n,
                                            MotarConvention convention = MotarConvention::devkit) {
  if (n < 2) throw Error(ErrorKind::RecallOutOfRange, "at least two recall points are required");
  const std::int64_t gt = table.gt;
  std::vector<SweepPoint> points(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) points[k - 1].recall_target = static_cast<double>(k) / static_cast<double>(n - 1);
  if (gt == 0) return points;

  // Targets are ascending, so the first threshold (from the top) reaching a
  // recall settles every still-open target at or below it.
  std::size_t open = 0;
  for (std::size_t i = 0; i < table.thresholds.size() && open < points.size(); ++i) {
    const ClearCounts& c = table.counts[i];
    // TP/GT >= k/(n-1) compared in integers.
    while (open < points.size() && c.tp * (n - 1) >= static_cast<std::int64_t>(open + 1) * gt) {
      SweepPoint& p = points[open];
      p.threshold = table.thresholds[i];
      p.counts = c;
      p.motar = motar(c.ids, c.fp, c.fn, c.gt, c.recall(), convention);
      ++open;
    }
  }
  return points;
}

inline std::vector<SweepPoint> recall_sweep(const ClassIndex& idx, int n, double dist_th,
                                            MotarConvention convention = MotarConvention::devkit) {
  if (n < 2) throw Error(ErrorKind::RecallOutOfRange, "at least two recall points are required");
  return recall_sweep(ThresholdTable::build(idx, dist_th), n, convention);
}

inline double amota(std::span<const SweepPoint> sweep) {
  if (sweep.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : sweep) sum += p.motar;
  return sum / static_cast<double>(sweep.size());
}

struct BestMota {
  std::optional<double> threshold;  // nullopt when there are no predictions
  double mota = 0.0;
  ClearCounts counts;
};

/// Maximum MOTA over every distinct prediction score used as a threshold.
/// Ties resolve to the lowest threshold.
inline BestMota best_mota(const ThresholdTable& table) {
  BestMota best;
  if (table.thresholds.empty()) {
    best.counts = table.empty;
    best.mota = mota(best.counts.fp, best.counts.fn, best.counts.ids, table.gt);
    return best;
  }
  for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
    const ClearCounts& c = table.counts[i];
    const double m = mota(c.fp, c.fn, c.ids, table.gt);
    if (i == 0 || m >= best.mota) best = {table.thresholds[i], m, c};
  }
  return best;
}

inline BestMota best_mota(const ClassIndex& idx, double dist_th) {
  return best_mota(ThresholdTable::build(idx, dist_th));
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ClassReport {
  std::string label;
  double amota = 0.0;
  double mota = 0.0;
  std::optional<double> mota_threshold;
  ClearCounts counts;  // at the best-MOTA threshold
  std::vector<SweepPoint> sweep;
};

struct MetricsReport {
  std::vector<ClassReport> classes;
  double amota = 0.0;  // unweighted mean over classes
  double mota = 0.0;   // GT-weighted mean over classes
  ClearCounts counts;  // summed at each class's best-MOTA threshold
};

inline ClassReport evaluate_class(const ClassIndex& idx, const Options& opt) {
  ClassReport r;
  r.label = idx.label;
  const ThresholdTable table = ThresholdTable::build(idx, opt.dist_th);
  r.sweep = recall_sweep(table, opt.recall_points, opt.convention);
  r.amota = amota(r.sweep);
  const BestMota bm = best_mota(table);
  r.mota = bm.mota;
  r.mota_threshold = bm.threshold;
  r.counts = bm.counts;
  return r;
}

inline MetricsReport evaluate(std::span<const GtSequence> gt, std::span<const TrackSequence> tracks,
                              const Options& opt = {}) {
  const auto index = build_index(gt, tracks);
  MetricsReport rep;
  std::int64_t total_gt = 0;
  for (const auto& idx : index) total_gt += idx.gt_count();
  if (total_gt == 0) throw Error(ErrorKind::ZeroGroundTruth, "ground truth is empty");

  double weighted_mota = 0.0;
  for (const auto& idx : index) {
    ClassReport cr = evaluate_class(idx, opt);
    rep.amota += cr.amota;
    weighted_mota += cr.mota * static_cast<double>(cr.counts.gt);
    rep.counts += cr.counts;
    rep.classes.push_back(std::move(cr));
  }
  rep.amota /= static_cast<double>(rep.classes.size());
  rep.mota = weighted_mota / static_cast<double>(total_gt);
  return rep;
}

}  // namespace confmot::eval
