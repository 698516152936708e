#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "confmot/evaluation.hpp"
#include "confmot/keyvalue.hpp"

namespace confmot::eval {

inline nlohmann::json counts_json(const ClearCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"ids", c.ids}, {"gt", c.gt}};
}

inline nlohmann::json report_json(const MetricsReport& rep, const Options& opt) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : rep.classes) {
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& p : c.sweep) {
      sweep.push_back({{"recall", p.recall_target},
                       {"threshold", p.threshold ? nlohmann::json(*p.threshold) : nlohmann::json(nullptr)},
                       {"motar", p.motar},
                       {"counts", counts_json(p.counts)}});
    }
    classes.push_back({{"class", c.label},
                       {"amota", c.amota},
                       {"mota", c.mota},
                       {"mota_threshold", c.mota_threshold ? nlohmann::json(*c.mota_threshold) : nlohmann::json(nullptr)},
                       {"counts", counts_json(c.counts)},
                       {"sweep", sweep}});
  }
  return {{"amota", rep.amota},
          {"mota", rep.mota},
          {"counts", counts_json(rep.counts)},
          {"options",
           {{"dist_th", opt.dist_th},
            {"recall_points", opt.recall_points},
            {"motar_convention", opt.convention == MotarConvention::devkit ? "devkit" : "paper"}}},
          {"classes", classes}};
}

/// Plain-text table: AMOTA, MOTA, FP, FN, IDS per class and overall.
inline std::string report_table(const MetricsReport& rep) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %8s %8s %8s\n", "class", "AMOTA", "MOTA", "FP", "FN", "IDS", "GT");
  out << line;
  auto row = [&](const std::string& label, double amota, double mota, const ClearCounts& c) {
    std::snprintf(line, sizeof line, "%-16s %8.4f %8.4f %8lld %8lld %8lld %8lld\n", label.c_str(), amota, mota,
                  static_cast<long long>(c.fp), static_cast<long long>(c.fn), static_cast<long long>(c.ids),
                  static_cast<long long>(c.gt));
    out << line;
  };
  for (const auto& c : rep.classes) row(c.label, c.amota, c.mota, c.counts);
  row("mean", rep.amota, rep.mota, rep.counts);
  return out.str();
}

/// One row per class and recall point, for plotting metric-vs-threshold curves.
inline std::string curve_csv(const MetricsReport& rep) {
  std::ostringstream out;
  out << "class,recall,threshold,motar,tp,fp,fn,ids,gt\n";
  for (const auto& c : rep.classes) {
    for (const auto& p : c.sweep) {
      out << c.label << ',' << kv::format_double(p.recall_target) << ',' << (p.threshold ? kv::format_double(*p.threshold) : "")
          << ',' << kv::format_double(p.motar) << ',' << p.counts.tp << ',' << p.counts.fp << ',' << p.counts.fn << ','
          << p.counts.ids << ',' << p.counts.gt << '\n';
    }
  }
  return out.str();
}

}  // namespace confmot::eval
