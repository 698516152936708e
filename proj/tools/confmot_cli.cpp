// confmot command-line interface: synth, track, ensemble, eval, ablate.
//
// Exit status: 0 on success, 1 on validation errors, 2 on I/O errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confmot/confmot.hpp"

namespace fs = std::filesystem;
using namespace confmot;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

struct EvalFlags {
  double dist_th = 2.0;
  int recall_points = 40;
  std::string convention = "devkit";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dist-th", dist_th, "center-distance threshold for a true positive (m)")->check(CLI::PositiveNumber);
    cmd->add_option("--recall-points", recall_points, "number of recall values n")->check(CLI::Range(2, 10000));
    cmd->add_option("--motar-convention", convention, "devkit or paper")->check(CLI::IsMember({"devkit", "paper"}));
  }

  eval::Options options() const {
    eval::Options o;
    o.dist_th = dist_th;
    o.recall_points = recall_points;
    o.convention = convention == "paper" ? eval::MotarConvention::paper : eval::MotarConvention::devkit;
    return o;
  }
};

// synth ----------------------------------------------------------------------

struct SynthArgs {
  std::string suite;
  std::string spec;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  int count = 20;
};

int run_synth(const SynthArgs& a) {
  std::vector<synth::ScenarioSpec> specs;
  if (!a.suite.empty()) {
    specs = synth::scenario_suite(a.suite, a.count);
  } else {
    specs.push_back(io::parse_scenario_spec(kv::Document::load(a.spec)));
  }
  if (a.seed_override) {
    for (std::size_t i = 0; i < specs.size(); ++i) specs[i].seed = *a.seed_override + i;
  }
  if (!fs::is_directory(a.out_dir)) throw Error(ErrorKind::IoFailure, "output directory does not exist: " + a.out_dir);

  std::vector<GtSequence> gt;
  std::vector<DetectionSequence> det;
  for (const auto& s : specs) {
    auto scenario = synth::generate(s);
    std::cout << "scenario " << s.name << " seed " << s.seed << "\n";
    gt.push_back(std::move(scenario.gt));
    det.push_back(std::move(scenario.detections));
  }
  const std::string gt_path = (fs::path(a.out_dir) / "gt.jsonl").string();
  const std::string det_path = (fs::path(a.out_dir) / "det.jsonl").string();
  io::write_groundtruth(gt_path, gt);
  io::write_detections(det_path, det);
  std::cout << "wrote " << gt_path << " and " << det_path << "\n";
  return 0;
}

// track ----------------------------------------------------------------------

struct TrackArgs {
  std::string config;
  std::string det;
  std::string out;
  unsigned threads = 1;
};

int run_track(const TrackArgs& a) {
  const TrackerConfig cfg = io::load_tracker_config(a.config);
  const auto det = io::read_detections(a.det);
  const auto tracks = run_sequences(cfg, det, a.threads);
  io::write_tracks(a.out, tracks);

  std::size_t records = 0;
  std::set<std::pair<std::string, TrackId>> ids;
  for (const auto& s : tracks)
    for (const auto& f : s.frames)
      for (const auto& r : f.records) {
        ++records;
        ids.insert({s.name, r.track_id});
      }
  std::cout << "sequences " << tracks.size() << " tracklets " << ids.size() << " records " << records << "\n";
  return 0;
}

// ensemble -------------------------------------------------------------------

struct EnsembleArgs {
  std::string config;
  std::string a;
  std::string b;
  std::string out;
};

int run_ensemble(const EnsembleArgs& args) {
  const ensemble::Config cfg = io::parse_ensemble_config(kv::Document::load(args.config));
  const auto a = io::read_tracks(args.a);
  const auto b = io::read_tracks(args.b);

  std::map<std::string, const TrackSequence*> b_by_name;
  for (const auto& s : b) b_by_name[s.name] = &s;
  if (a.size() != b.size()) throw Error(ErrorKind::FrameMismatch, "inputs hold different sequences");

  std::vector<TrackSequence> fused;
  std::size_t records = 0;
  for (const auto& sa : a) {
    auto it = b_by_name.find(sa.name);
    if (it == b_by_name.end()) throw Error(ErrorKind::FrameMismatch, "sequence '" + sa.name + "' missing from " + args.b);
    if (sa.frames.size() != it->second->frames.size()) {
      throw Error(ErrorKind::FrameMismatch, "sequence '" + sa.name + "' spans different frame ranges");
    }
    TrackSequence s{sa.name, ensemble::fuse_sequence(cfg, sa.frames, it->second->frames)};
    for (const auto& f : s.frames) records += f.records.size();
    fused.push_back(std::move(s));
  }
  io::write_tracks(args.out, fused);
  std::cout << "strategy " << io::enum_name(cfg.strategy) << " sequences " << fused.size() << " records " << records
            << "\n";
  return 0;
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string gt;
  std::string tracks;
  std::string out;
  std::string curve;
  EvalFlags flags;
};

int run_eval(const EvalArgs& a) {
  const auto gt = io::read_groundtruth(a.gt);
  const auto tracks = io::read_tracks(a.tracks);
  const eval::Options opt = a.flags.options();
  const auto rep = eval::evaluate(gt, tracks, opt);
  if (!a.out.empty()) write_text(a.out, eval::report_json(rep, opt).dump(2) + "\n");
  if (!a.curve.empty()) write_text(a.curve, eval::curve_csv(rep));
  std::cout << eval::report_table(rep);
  return 0;
}

// ablate ---------------------------------------------------------------------

struct AblateArgs {
  std::string config;
  std::string det;
  std::string gt;
  std::string out;
  unsigned threads = 1;
  EvalFlags flags;
};

int run_ablate(const AblateArgs& a) {
  const auto cells = io::parse_grid(kv::Document::load(a.config));
  const auto det = io::read_detections(a.det);
  const auto gt = io::read_groundtruth(a.gt);
  const auto rows = run_ablation(cells, det, gt, a.flags.options(), a.threads);
  write_text(a.out, ablation_csv(rows));
  std::cout << "grid cells " << rows.size() << " written to " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confidence-based 3D multi-object tracking toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic ground truth and detections");
  auto* suite_opt = synth_cmd->add_option("--suite", synth_args.suite, "easy, occlusion, clutter or crossing");
  auto* spec_opt = synth_cmd->add_option("--spec", synth_args.spec, "scenario spec file");
  suite_opt->excludes(spec_opt);
  synth_cmd->add_option("--out-dir,--out", synth_args.out_dir, "existing output directory")->required();
  synth_cmd->add_option("--seed-override", synth_args.seed_override, "replace scenario seeds (seed + index)");
  synth_cmd->add_option("--count", synth_args.count, "scenarios per suite")->check(CLI::Range(1, 100000));

  TrackArgs track_args;
  auto* track_cmd = app.add_subcommand("track", "run the tracker over a detection file");
  track_cmd->add_option("--config", track_args.config, "tracker config file")->required();
  track_cmd->add_option("--det", track_args.det, "detection file")->required();
  track_cmd->add_option("--out", track_args.out, "track file to write")->required();
  track_cmd->add_option("--threads", track_args.threads, "worker threads")->check(CLI::Range(1u, 256u));

  EnsembleArgs ens_args;
  auto* ens_cmd = app.add_subcommand("ensemble", "late-fuse two track files");
  ens_cmd->add_option("--config", ens_args.config, "ensemble config file")->required();
  ens_cmd->add_option("--a", ens_args.a, "first track file")->required();
  ens_cmd->add_option("--b", ens_args.b, "second track file")->required();
  ens_cmd->add_option("--out", ens_args.out, "fused track file to write")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate tracks against ground truth");
  eval_cmd->add_option("--gt", eval_args.gt, "ground-truth file")->required();
  eval_cmd->add_option("--tracks", eval_args.tracks, "track file")->required();
  eval_cmd->add_option("--out", eval_args.out, "JSON report file");
  eval_cmd->add_option("--curve", eval_args.curve, "per-recall CSV curve file");
  eval_args.flags.add_to(eval_cmd);

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "grid search over tracker settings");
  ablate_cmd->add_option("--config", ablate_args.config, "grid file")->required();
  ablate_cmd->add_option("--det", ablate_args.det, "detection file")->required();
  ablate_cmd->add_option("--gt", ablate_args.gt, "ground-truth file")->required();
  ablate_cmd->add_option("--out", ablate_args.out, "CSV file to write")->required();
  ablate_cmd->add_option("--threads", ablate_args.threads, "worker threads")->check(CLI::Range(1u, 256u));
  ablate_args.flags.add_to(ablate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*synth_cmd) {
      if (synth_args.suite.empty() && synth_args.spec.empty()) {
        std::cerr << "synth: one of --suite or --spec is required\n";
        return kExitValidation;
      }
      return run_synth(synth_args);
    }
    if (*track_cmd) return run_track(track_args);
    if (*ens_cmd) return run_ensemble(ens_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*ablate_cmd) return run_ablate(ablate_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_io() ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
