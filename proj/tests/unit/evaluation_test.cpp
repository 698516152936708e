#include <gtest/gtest.h>

#include "support.hpp"

using namespace confmot;
using namespace confmot::eval;
using support::gt_at;
using support::track_at;

namespace {

std::vector<FrameMatches> associate(const std::vector<GtFrame>& g, const std::vector<FrameOutput>& t,
                                    double th = 0.0) {
  const std::vector<GtSequence> gs{{"s", g}};
  const std::vector<TrackSequence> ts{{"s", t}};
  const auto idx = build_index(gs, ts);
  EXPECT_EQ(idx.size(), 1u);
  return associate_frames(idx[0].sequences[0], th, 2.0);
}

ClearCounts total(const std::vector<FrameMatches>& fm) {
  ClearCounts c;
  for (const auto& f : fm) c += f.counts;
  return c;
}

}  // namespace

TEST(Associate, Examples) {
  auto c = total(associate({{0, {gt_at(0, 1, 0, 0)}}}, {{0, {track_at(0, 7, 1, 0, 0.9)}}}));
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fp, 0);
  EXPECT_EQ(c.fn, 0);

  c = total(associate({{0, {gt_at(0, 1, 0, 0)}}}, {{0, {track_at(0, 7, 3, 0, 0.9)}}}));
  EXPECT_EQ(c.tp, 0);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);

  c = total(associate({{1, {gt_at(1, 1, 0, 0)}}, {2, {gt_at(2, 1, 0, 0)}}},
                      {{1, {track_at(1, 7, 0, 0, 0.9)}}, {2, {track_at(2, 9, 0, 0, 0.9)}}}));
  EXPECT_EQ(c.ids, 1);
  EXPECT_EQ(c.tp, 2);
}

TEST(Associate, ContinuityBeatsDistance) {
  // track 7 stays with gt 1 even though track 8 is nearer in frame 1
  const auto fm = associate({{0, {gt_at(0, 1, 0, 0)}}, {1, {gt_at(1, 1, 0, 0)}}},
                            {{0, {track_at(0, 7, 0.1, 0, 0.9)}},
                             {1, {track_at(1, 7, 1.5, 0, 0.9), track_at(1, 8, 0.1, 0, 0.9)}}});
  EXPECT_EQ(fm[1].pairs, (std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 7}}));
  EXPECT_EQ(total(fm).ids, 0);
}

TEST(Associate, CountsBalancePerFrame) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto toy = support::random_toy(seed);
    const auto g = support::toy_gt(toy);
    const auto t = support::toy_tracks(toy);
    for (const auto& idx : build_index(g, t))
      for (const auto& seq : idx.sequences)
        for (double th : {0.0, 0.35, 0.75}) {
          const auto fm = associate_frames(seq, th, 2.0);
          for (std::size_t f = 0; f < fm.size(); ++f) {
            std::int64_t preds = 0;
            for (const auto& p : seq[f].pred) preds += p.score >= th;
            ASSERT_EQ(fm[f].counts.tp + fm[f].counts.fn, static_cast<std::int64_t>(seq[f].gt.size()));
            ASSERT_EQ(fm[f].counts.tp + fm[f].counts.fp, preds);
          }
        }
  }
}

TEST(Formulas, Mota) {
  EXPECT_DOUBLE_EQ(mota(1, 2, 0, 10), 0.7);
  EXPECT_DOUBLE_EQ(mota(0, 0, 0, 10), 1.0);
  EXPECT_DOUBLE_EQ(mota(20, 0, 0, 10), -1.0);
  try {
    mota(0, 0, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroGroundTruth);
  }
}

TEST(Formulas, Motar) {
  EXPECT_NEAR(motar(0, 1, 2, 10, 1.0), 0.7, 1e-12);
  EXPECT_NEAR(motar(0, 0, 5, 10, 0.5), 1.0, 1e-12);
  EXPECT_EQ(motar(0, 6, 5, 10, 0.5), 0.0);
  // printed sign: an otherwise perfect tracker scores 0 at half recall
  EXPECT_EQ(motar(0, 0, 5, 10, 0.5, MotarConvention::paper), 0.0);
  EXPECT_NEAR(motar(0, 1, 2, 10, 1.0, MotarConvention::paper), 0.7, 1e-12);
  auto kind = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoFailure;
  };
  EXPECT_EQ(kind([] { motar(0, 0, 0, 0, 0.5); }), ErrorKind::ZeroGroundTruth);
  EXPECT_EQ(kind([] { motar(0, 0, 0, 10, 0.0); }), ErrorKind::RecallOutOfRange);
  EXPECT_EQ(kind([] { motar(0, 0, 0, 10, 1.2); }), ErrorKind::RecallOutOfRange);
}

TEST(Formulas, MotarAtFullRecallIsClampedMota) {
  for (int fp = 0; fp < 15; ++fp)
    for (int ids = 0; ids < 4; ++ids) EXPECT_NEAR(motar(ids, fp, 0, 10, 1.0), std::max(0.0, mota(fp, 0, ids, 10)), 1e-12);
}

TEST(Formulas, Amota) {
  std::vector<SweepPoint> pts(3);
  for (auto& p : pts) p.motar = 1.0;
  EXPECT_DOUBLE_EQ(amota(pts), 1.0);
  for (auto& p : pts) p.motar = 0.0;
  EXPECT_DOUBLE_EQ(amota(pts), 0.0);
  pts[0].motar = 1.0;
  pts[1].motar = 0.5;
  EXPECT_DOUBLE_EQ(amota(pts), 0.5);
}

TEST(Sweep, PerfectAndEmpty) {
  const auto fx = support::metric_fixtures()[0];
  auto idx = build_index(fx.gt, fx.tracks);
  for (const auto& p : recall_sweep(idx[0], 3, 2.0)) EXPECT_EQ(p.motar, 1.0);
  const std::vector<TrackSequence> none;
  idx = build_index(fx.gt, none);
  for (const auto& p : recall_sweep(idx[0], 3, 2.0)) {
    EXPECT_EQ(p.motar, 0.0);
    EXPECT_FALSE(p.threshold.has_value());
  }
  EXPECT_THROW(recall_sweep(idx[0], 1, 2.0), Error);
}

TEST(Sweep, TwoScoredFalsePositives) {
  // 10 gt boxes tracked at 0.9; false positives at 0.3 and 0.6
  std::vector<GtFrame> g;
  std::vector<FrameOutput> t;
  for (int f = 0; f < 5; ++f) {
    g.push_back({f, {gt_at(f, 1, f, 0), gt_at(f, 2, 10, f)}});
    FrameOutput fo{f, {track_at(f, 7, f, 0, 0.9), track_at(f, 8, 10, f, 0.9)}};
    if (f == 1) fo.records.push_back(track_at(f, 20, -30, 0, 0.3));
    if (f == 3) fo.records.push_back(track_at(f, 21, -30, 9, 0.6));
    t.push_back(fo);
  }
  const std::vector<GtSequence> gs{{"s", g}};
  const std::vector<TrackSequence> ts{{"s", t}};
  const auto sweep = recall_sweep(build_index(gs, ts)[0], 5, 2.0);
  for (const auto& p : sweep) {
    ASSERT_TRUE(p.threshold.has_value());
    EXPECT_EQ(*p.threshold, 0.9);
    EXPECT_EQ(p.motar, 1.0);
  }
  const auto bm = best_mota(build_index(gs, ts)[0], 2.0);
  EXPECT_EQ(bm.threshold, 0.9);
  EXPECT_DOUBLE_EQ(bm.mota, 1.0);
}

TEST(Sweep, AgreesWithBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto toy = support::random_toy(seed);
    const auto idx = build_index(support::toy_gt(toy), support::toy_tracks(toy));
    ASSERT_EQ(idx.size(), 1u);
    for (int n : {2, 5, 11}) {
      const auto sweep = recall_sweep(idx[0], n, 2.0);
      const auto ref = oracle::brute_sweep(toy, n, 2.0);
      ASSERT_EQ(sweep.size(), ref.size());
      for (std::size_t k = 0; k < sweep.size(); ++k) {
        ASSERT_EQ(sweep[k].threshold, ref[k].threshold) << "seed " << seed << " n " << n << " k " << k;
        if (!ref[k].threshold) continue;
        EXPECT_EQ(sweep[k].counts.tp, ref[k].counts.tp);
        EXPECT_EQ(sweep[k].counts.fp, ref[k].counts.fp);
        EXPECT_EQ(sweep[k].counts.fn, ref[k].counts.fn);
        EXPECT_EQ(sweep[k].counts.ids, ref[k].counts.ids);
      }
    }
    const auto [ref_mota, ref_counts] = oracle::brute_best_mota(toy, 2.0);
    const auto bm = best_mota(idx[0], 2.0);
    EXPECT_NEAR(bm.mota, ref_mota, 1e-12) << "seed " << seed;
    EXPECT_EQ(bm.counts.fp, ref_counts.fp);
  }
}

TEST(Sweep, RemovingFalsePositiveNeverHurts) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto toy = support::random_toy(seed);
    const auto gt = support::toy_gt(toy);
    const auto before = recall_sweep(build_index(gt, support::toy_tracks(toy))[0], 11, 2.0);
    // drop every prediction farther than the gate from all ground truth
    for (auto& seq : toy)
      for (auto& f : seq) {
        std::vector<oracle::ToyPred> kept;
        for (const auto& p : f.pred) {
          bool near = false;
          for (const auto& g : f.gt) near = near || std::hypot(g.x - p.x, g.y - p.y) <= 2.0;
          if (near) kept.push_back(p);
        }
        f.pred = kept;
      }
    const auto after = recall_sweep(build_index(gt, support::toy_tracks(toy))[0], 11, 2.0);
    for (std::size_t k = 0; k < before.size(); ++k) EXPECT_GE(after[k].motar, before[k].motar - 1e-12) << seed;
  }
}

TEST(BestMota, Examples) {
  // one TP per frame at 0.8, two far FPs at 0.2
  std::vector<GtFrame> g;
  std::vector<FrameOutput> t;
  for (int f = 0; f < 4; ++f) {
    g.push_back({f, {gt_at(f, 1, 0, 0)}});
    FrameOutput fo{f, {track_at(f, 3, 0, 0, 0.8)}};
    if (f < 2) fo.records.push_back(track_at(f, 10 + f, 40, 40, 0.2));
    t.push_back(fo);
  }
  std::vector<GtSequence> gs{{"s", g}};
  std::vector<TrackSequence> ts{{"s", t}};
  auto bm = best_mota(build_index(gs, ts)[0], 2.0);
  EXPECT_EQ(bm.threshold, 0.8);
  EXPECT_DOUBLE_EQ(bm.mota, 1.0);

  const std::vector<TrackSequence> none;
  bm = best_mota(build_index(gs, none)[0], 2.0);
  EXPECT_FALSE(bm.threshold.has_value());
  EXPECT_DOUBLE_EQ(bm.mota, 0.0);

  // all scores equal-valued TPs: lowest threshold wins the tie
  for (auto& f : t) f.records.resize(1);
  t[0].records[0].score = 0.4;
  ts = {{"s", t}};
  bm = best_mota(build_index(gs, ts)[0], 2.0);
  EXPECT_EQ(bm.threshold, 0.4);
  EXPECT_DOUBLE_EQ(bm.mota, 1.0);
}

TEST(Evaluate, Fixtures) {
  for (const auto& fx : support::metric_fixtures()) {
    const auto rep = evaluate(fx.gt, fx.tracks);
    EXPECT_EQ(rep.counts.fp, fx.fp) << fx.name;
    EXPECT_EQ(rep.counts.fn, fx.fn) << fx.name;
    EXPECT_EQ(rep.counts.ids, fx.ids) << fx.name;
    EXPECT_EQ(rep.counts.gt, fx.gt_boxes) << fx.name;
    EXPECT_NEAR(rep.mota, fx.mota, 1e-12) << fx.name;
  }
}

TEST(Evaluate, GroundTruthAgainstItself) {
  const auto sc = synth::generate(synth::scenario_suite("crossing", 1)[0]);
  TrackSequence self{sc.gt.name, {}};
  for (const auto& f : sc.gt.frames) {
    FrameOutput fo{f.frame_index, {}};
    for (const auto& o : f.objects) fo.records.push_back(track_at(f.frame_index, o.instance_id, o.x, o.y, 1.0, o.class_label));
    self.frames.push_back(fo);
  }
  const std::vector<GtSequence> gs{sc.gt};
  const std::vector<TrackSequence> ts{self};
  const auto rep = evaluate(gs, ts);
  EXPECT_DOUBLE_EQ(rep.amota, 1.0);
  EXPECT_EQ(rep.counts.fp, 0);
  EXPECT_EQ(rep.counts.fn, 0);
  EXPECT_EQ(rep.counts.ids, 0);
}

TEST(Evaluate, EmptyTracksScoreZero) {
  const auto fx = support::metric_fixtures()[0];
  const std::vector<TrackSequence> none;
  const auto rep = evaluate(fx.gt, none);
  EXPECT_EQ(rep.amota, 0.0);
  EXPECT_EQ(rep.counts.fn, fx.gt_boxes);
}

TEST(Evaluate, ClassMeans) {
  // cars perfect, pedestrians never predicted
  std::vector<GtFrame> g;
  std::vector<FrameOutput> t;
  for (int f = 0; f < 3; ++f) {
    g.push_back({f, {gt_at(f, 1, 0, 0, "car"), gt_at(f, 2, 5, 5, "pedestrian"), gt_at(f, 3, 9, 9, "pedestrian")}});
    t.push_back({f, {track_at(f, 1, 0, 0, 0.9, "car")}});
  }
  const std::vector<GtSequence> gs{{"s", g}};
  const std::vector<TrackSequence> ts{{"s", t}};
  const auto rep = evaluate(gs, ts);
  ASSERT_EQ(rep.classes.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.amota, 0.5);
  EXPECT_NEAR(rep.mota, (1.0 * 3 + 0.0 * 6) / 9.0, 1e-12);
}

TEST(Evaluate, Deterministic) {
  const auto sc = synth::generate(support::random_spec(4));
  const std::vector<GtSequence> gs{sc.gt};
  const auto tracks = run_sequences(support::confidence_tuned(0.1), std::vector<DetectionSequence>{sc.detections});
  const auto a = report_json(evaluate(gs, tracks), {}).dump();
  const auto b = report_json(evaluate(gs, tracks), {}).dump();
  EXPECT_EQ(a, b);
  EXPECT_THROW(evaluate(std::vector<GtSequence>{}, tracks), Error);
}
