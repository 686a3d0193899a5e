#include "sqcsef/grading.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "sqcsef/error.hpp"

namespace sqcsef::grading {

using json = nlohmann::ordered_json;

std::vector<ClusterGeometry> cluster_geometry(const Eigen::MatrixXd& data, const ClusteringResult& result) {
  const int k = result.k();
  if (static_cast<Eigen::Index>(result.assignments.size()) != data.rows()) {
    throw DataError(fmt::format("clustering covers {} samples but the matrix has {}", result.assignments.size(),
                                data.rows()));
  }
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    const int c = result.assignments[i];
    if (c < 0 || c >= k) throw DataError(fmt::format("sample {} has cluster index {} outside [0, {})", i + 1, c, k));
    members[static_cast<std::size_t>(c)].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<ClusterGeometry> out;
  out.reserve(members.size());
  for (int c = 0; c < k; ++c) {
    const auto& idx = members[static_cast<std::size_t>(c)];
    if (idx.size() < 2) {
      throw NumericError(fmt::format("cluster {} has {} member(s); a radius needs at least 2", c, idx.size()));
    }
    ClusterGeometry g;
    g.cluster = c;
    g.size = static_cast<int>(idx.size());
    g.center = Eigen::VectorXd::Zero(data.cols());
    for (auto i : idx) g.center += data.row(i).transpose();
    g.center /= static_cast<double>(idx.size());
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(data.cols());
    for (auto i : idx) ss += (data.row(i).transpose() - g.center).cwiseAbs2();
    g.attribute_std = (ss / static_cast<double>(idx.size() - 1)).cwiseSqrt();
    g.radius = std::sqrt(g.attribute_std.squaredNorm());
    out.push_back(std::move(g));
  }
  return out;
}

ClusterGeometry injected_geometry(int cluster, Eigen::VectorXd center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw DataError(fmt::format("cluster {}: radius must be finite and non-negative", cluster));
  }
  ClusterGeometry g;
  g.cluster = cluster;
  g.center = std::move(center);
  g.radius = radius;
  return g;
}

std::vector<int> order_clusters(const std::vector<ClusterGeometry>& geoms) {
  std::vector<int> order(geoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return geoms[static_cast<std::size_t>(a)].center.mean() > geoms[static_cast<std::size_t>(b)].center.mean();
  });
  return order;
}

Eigen::VectorXd lower_bounds(const ClusterGeometry& g, std::vector<std::string>* warnings) {
  const double norm = g.center.norm();
  if (!(norm > 0.0)) throw NumericError(fmt::format("cluster {}: zero center has no lower bound", g.cluster));
  Eigen::VectorXd lb = g.center * (1.0 - g.radius / norm);
  bool clamped = false;
  for (Eigen::Index k = 0; k < lb.size(); ++k) {
    const double v = std::clamp(lb[k], 0.0, 1.0);
    if (v != lb[k]) clamped = true;
    lb[k] = v;
  }
  if (clamped && warnings != nullptr) {
    warnings->push_back(fmt::format("cluster {}: lower bound clamped to [0, 1] (radius {:.4f}, |center| {:.4f})",
                                    g.cluster, g.radius, norm));
  }
  return lb;
}

std::string to_string(Relation r) { return r == Relation::at_least ? "at_least" : "at_most"; }
std::string symbol(Relation r) { return r == Relation::at_least ? "≥" : "≤"; }

namespace {

Relation parse_relation(const std::string& s) {
  if (s == "at_least") return Relation::at_least;
  if (s == "at_most") return Relation::at_most;
  throw DataError("unknown relation '" + s + "'");
}

}  // namespace

Eigen::MatrixXd GradingStandard::standardized_bounds() const {
  const auto graded = levels.empty() ? 0 : levels.size() - 1;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(graded), static_cast<Eigen::Index>(indicators.size()));
  for (std::size_t i = 0; i < graded; ++i) {
    for (std::size_t k = 0; k < indicators.size(); ++k) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = levels[i].thresholds[k].standardized;
    }
  }
  return out;
}

std::string level_name(std::size_t index) {
  static const char* const kRoman[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"};
  if (index < std::size(kRoman)) return kRoman[index];
  return fmt::format("L{}", index + 1);
}

GradingStandard build_standard(const std::vector<ClusterGeometry>& ordered, const std::vector<IndicatorSpec>& indicators,
                               const std::vector<ScaleParams>& scale, const std::string& provenance) {
  if (ordered.size() < 2) throw DataError(fmt::format("a standard needs at least 2 clusters, got {}", ordered.size()));
  if (indicators.size() != scale.size()) throw DataError("indicator and scale counts differ");
  const auto n = static_cast<Eigen::Index>(indicators.size());
  for (const auto& g : ordered) {
    if (g.center.size() != n) {
      throw DataError(fmt::format("cluster {} center has {} coordinates, expected {}", g.cluster, g.center.size(), n));
    }
  }

  GradingStandard s;
  s.indicators = indicators;
  s.scale = scale;
  s.provenance = provenance;
  s.min_conditions = static_cast<int>((indicators.size() + 1) / 2);

  for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
    Level level;
    level.name = level_name(i);
    level.cluster = ordered[i].cluster;
    const Eigen::VectorXd lb = lower_bounds(ordered[i], &s.warnings);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& spec = indicators[static_cast<std::size_t>(k)];
      Threshold t;
      t.standardized = lb[k];
      t.exact_value = denormalize_value(lb[k], spec, scale[static_cast<std::size_t>(k)]);
      t.relation = spec.direction == Direction::maximize ? Relation::at_least : Relation::at_most;
      t.value = t.exact_value;
      if (spec.integer_valued) {
        t.value = t.relation == Relation::at_most ? std::floor(t.exact_value) : std::ceil(t.exact_value);
      }
      level.thresholds.push_back(t);
    }
    s.levels.push_back(std::move(level));
  }
  Level worst;
  worst.name = level_name(ordered.size() - 1);
  worst.cluster = ordered.back().cluster;
  s.levels.push_back(std::move(worst));

  for (std::size_t i = 1; i + 1 < s.levels.size(); ++i) {
    const auto& hi = s.levels[i - 1].thresholds;
    const auto& lo = s.levels[i].thresholds;
    bool identical = true;
    for (std::size_t k = 0; k < hi.size(); ++k) {
      if (hi[k].standardized != lo[k].standardized) identical = false;
      if (hi[k].standardized < lo[k].standardized) {
        s.warnings.push_back(fmt::format("indicator '{}': level {} threshold is looser than level {}",
                                         indicators[k].name, s.levels[i - 1].name, s.levels[i].name));
      }
    }
    if (identical) {
      s.warnings.push_back(fmt::format("levels {} and {} have identical thresholds (degenerate clusters)",
                                       s.levels[i - 1].name, s.levels[i].name));
    }
  }
  return s;
}

GradingStandard build_standard(const std::vector<ClusterGeometry>& ordered, const StandardizedDataset& d,
                               const std::string& provenance) {
  return build_standard(ordered, d.indicators, d.scale, provenance);
}

GradeResult grade_sample(const GradingStandard& standard, std::span<const double> sample) {
  if (sample.size() != standard.indicators.size()) {
    throw DataError(fmt::format("sample has {} values, standard expects {}", sample.size(), standard.indicators.size()));
  }
  GradeResult r;
  r.level = static_cast<int>(standard.levels.size()) - 1;
  bool placed = false;
  for (std::size_t i = 0; i + 1 < standard.levels.size(); ++i) {
    int met = 0;
    const auto& th = standard.levels[i].thresholds;
    for (std::size_t k = 0; k < th.size(); ++k) {
      const bool ok = th[k].relation == Relation::at_least ? sample[k] >= th[k].value : sample[k] <= th[k].value;
      if (ok) ++met;
    }
    r.conditions_met.push_back(met);
    if (!placed && met >= standard.min_conditions) {
      r.level = static_cast<int>(i);
      placed = true;
    }
  }
  r.name = standard.levels[static_cast<std::size_t>(r.level)].name;
  return r;
}

int display_decimals(const IndicatorSpec& spec, const ScaleParams& scale) {
  if (spec.decimals >= 0) return spec.decimals;
  if (spec.integer_valued) return 0;
  const double range = scale.hi - scale.lo;
  if (!(range > 0.0)) return 2;
  return std::max(0, 2 - static_cast<int>(std::floor(std::log10(range))));
}

std::string standard_markdown(const GradingStandard& s) {
  std::string out = "| Level | Requirement |";
  std::string rule = "|---|---|";
  for (const auto& spec : s.indicators) {
    out += spec.unit.empty() ? fmt::format(" {} |", spec.name) : fmt::format(" {} ({}) |", spec.name, spec.unit);
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  std::string passed;
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    const auto& level = s.levels[i];
    std::string requirement;
    if (level.thresholds.empty()) {
      requirement = fmt::format("Not meet the condition of level {}", passed);
    } else if (i == 0) {
      requirement = fmt::format("Meet at least {} of the following conditions", s.min_conditions);
    } else {
      requirement = fmt::format("Not meet the condition of level {} and meet at least {} of the following conditions",
                                passed, s.min_conditions);
    }
    out += fmt::format("| {} | {} |", level.name, requirement);
    for (std::size_t k = 0; k < s.indicators.size(); ++k) {
      if (level.thresholds.empty()) {
        out += " |";
      } else {
        const auto& t = level.thresholds[k];
        out += fmt::format(" {} {:.{}f} |", symbol(t.relation), t.value, display_decimals(s.indicators[k], s.scale[k]));
      }
    }
    out += "\n";
    passed += (passed.empty() ? "" : ",") + level.name;
  }
  return out;
}

std::string standard_json(const GradingStandard& s) {
  json j;
  j["format"] = "sqcsef-grading-standard";
  j["version"] = 1;
  j["provenance"] = s.provenance;
  j["min_conditions"] = s.min_conditions;
  j["indicators"] = json::array();
  for (std::size_t k = 0; k < s.indicators.size(); ++k) {
    const auto& spec = s.indicators[k];
    j["indicators"].push_back({{"name", spec.name},
                               {"unit", spec.unit},
                               {"direction", to_string(spec.direction)},
                               {"integer", spec.integer_valued},
                               {"decimals", spec.decimals},
                               {"lo", s.scale[k].lo},
                               {"hi", s.scale[k].hi},
                               {"forward_max", s.scale[k].forward_max}});
  }
  j["levels"] = json::array();
  for (const auto& level : s.levels) {
    json l{{"name", level.name}, {"cluster", level.cluster}, {"thresholds", json::array()}};
    for (std::size_t k = 0; k < level.thresholds.size(); ++k) {
      const auto& t = level.thresholds[k];
      l["thresholds"].push_back({{"indicator", s.indicators[k].name},
                                 {"relation", to_string(t.relation)},
                                 {"value", t.value},
                                 {"exact_value", t.exact_value},
                                 {"standardized", t.standardized}});
    }
    j["levels"].push_back(std::move(l));
  }
  j["warnings"] = s.warnings;
  return j.dump(2) + "\n";
}

GradingStandard standard_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("grading standard: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "sqcsef-grading-standard") {
      throw DataError("grading standard: unexpected format tag");
    }
    if (j.at("version").get<int>() != 1) throw DataError("grading standard: unsupported version");
    GradingStandard s;
    s.provenance = j.at("provenance").get<std::string>();
    s.min_conditions = j.at("min_conditions").get<int>();
    for (const auto& ij : j.at("indicators")) {
      IndicatorSpec spec;
      spec.name = ij.at("name").get<std::string>();
      spec.unit = ij.at("unit").get<std::string>();
      spec.direction = parse_direction(ij.at("direction").get<std::string>());
      spec.integer_valued = ij.at("integer").get<bool>();
      spec.decimals = ij.at("decimals").get<int>();
      s.indicators.push_back(std::move(spec));
      s.scale.push_back({ij.at("lo").get<double>(), ij.at("hi").get<double>(), ij.at("forward_max").get<double>()});
    }
    for (const auto& lj : j.at("levels")) {
      Level level;
      level.name = lj.at("name").get<std::string>();
      level.cluster = lj.at("cluster").get<int>();
      for (const auto& tj : lj.at("thresholds")) {
        Threshold t;
        t.relation = parse_relation(tj.at("relation").get<std::string>());
        t.value = tj.at("value").get<double>();
        t.exact_value = tj.at("exact_value").get<double>();
        t.standardized = tj.at("standardized").get<double>();
        level.thresholds.push_back(t);
      }
      if (!level.thresholds.empty() && level.thresholds.size() != s.indicators.size()) {
        throw DataError("grading standard: level " + level.name + " has the wrong number of thresholds");
      }
      s.levels.push_back(std::move(level));
    }
    if (s.levels.size() < 2) throw DataError("grading standard: needs at least 2 levels");
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("grading standard: ") + e.what());
  }
}

}  // namespace sqcsef::grading
