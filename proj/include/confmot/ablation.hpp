#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "confmot/evaluation.hpp"
#include "confmot/io.hpp"
#include "confmot/tracker.hpp"

namespace confmot {

struct AblationRow {
  UpdateFn update_fn;
  double score_decay;
  std::optional<int> max_age;
  double amota;
  double mota;
  eval::ClearCounts counts;
};

/// Tracks and evaluates every grid cell. Cells run on up to `threads`
/// workers; rows come back in grid order.
inline std::vector<AblationRow> run_ablation(const std::vector<io::GridCell>& cells,
                                             const std::vector<DetectionSequence>& detections,
                                             const std::vector<GtSequence>& gt, const eval::Options& opt,
                                             unsigned threads = 1) {
  std::vector<AblationRow> rows(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const auto tracks = run_sequences(cells[i].config, detections);
    const auto rep = eval::evaluate(gt, tracks, opt);
    rows[i] = {cells[i].update_fn, cells[i].score_decay, cells[i].max_age, rep.amota, rep.mota, rep.counts};
  });
  return rows;
}

inline std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "update_fn,score_decay,max_age,amota,mota,fp,fn,ids\n";
  for (const auto& r : rows) {
    out << io::enum_name(r.update_fn) << ',' << kv::format_double(r.score_decay) << ','
        << io::format_max_age(r.max_age) << ',' << kv::format_double(r.amota) << ',' << kv::format_double(r.mota)
        << ',' << r.counts.fp << ',' << r.counts.fn << ',' << r.counts.ids << '\n';
  }
  return out.str();
}

}  // namespace confmot
