#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>

#include <nlohmann/json.hpp>

#include "torpsido/verify.hpp"

namespace torpsido {

/// Non-finite doubles are spelled "inf", "-inf", "nan" so the JSON stays valid.
inline nlohmann::json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline nlohmann::json to_json(const EstimateReport& r) {
  using nlohmann::json;
  json j;
  j["experiment"] = r.experiment;
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = number_to_json(v);
  for (const auto& [k, v] : r.labels) params[k] = v;
  j["params"] = params;
  json series = json::array();
  for (const auto& p : r.series)
    series.push_back({{"series", p.series}, {"index", number_to_json(p.index)}, {"value", number_to_json(p.value)}});
  j["series"] = series;
  json fits = json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"name", f.name},
                    {"slope", number_to_json(f.slope)},
                    {"intercept", number_to_json(f.intercept)},
                    {"residual", number_to_json(f.residual)},
                    {"points", f.points}});
  j["fits"] = fits;
  json verdicts = json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"measured", number_to_json(v.measured)},
                        {"threshold", number_to_json(v.threshold)},
                        {"detail", v.detail}});
  j["verdicts"] = verdicts;
  j["notes"] = r.notes;
  return j;
}

/// Long format: experiment,series,index,value. Fits appear as series "fit:<name>:<field>".
inline void write_csv(std::ostream& os, const std::vector<EstimateReport>& reports) {
  os << "experiment,series,index,value\n";
  os << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& p : r.series) os << r.experiment << ',' << p.series << ',' << p.index << ',' << p.value << '\n';
    for (const auto& f : r.fits) {
      os << r.experiment << ",fit:" << f.name << ":slope,0," << f.slope << '\n';
      os << r.experiment << ",fit:" << f.name << ":intercept,0," << f.intercept << '\n';
      os << r.experiment << ",fit:" << f.name << ":residual,0," << f.residual << '\n';
    }
  }
}

inline void write_csv(std::ostream& os, const EstimateReport& r) { write_csv(os, std::vector<EstimateReport>{r}); }

}  // namespace torpsido
