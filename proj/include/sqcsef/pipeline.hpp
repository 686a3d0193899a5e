#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sqcsef/cluster_eval.hpp"
#include "sqcsef/config_file.hpp"
#include "sqcsef/cvcl.hpp"
#include "sqcsef/dataset.hpp"
#include "sqcsef/factors.hpp"
#include "sqcsef/grading.hpp"
#include "sqcsef/kmeans.hpp"
#include "sqcsef/report.hpp"
#include "sqcsef/stats.hpp"

namespace sqcsef::pipeline {

struct ManualView {
  std::string name;
  std::vector<std::string> indicators;
  double weight = 0.0;
};

struct FactorSettings {
  int n_factors = 3;
  std::vector<ManualView> manual_views;  ///< empty: views come from the rotated loadings
  bool kmo_override = false;             ///< let cvcl runs proceed below the KMO gate
};

/// Pipeline configuration file:
///
///   data = "seedlings.csv"          # relative to the config file
///   indicators = "indicators.toml"
///   method = "kmeans"               # or "cvcl"
///   k = 3
///   seed = 7
///   out = "run"
///   preset = "desk-scale"           # cvcl architecture preset
///   [kmeans]  tol, max_iter, n_restarts, init ("random" | "kmeans++")
///   [cvcl]    alpha, beta, lr, pre_epochs, train_epochs, encoder_hidden,
///             latent_dim, head_hidden
///   [factors] n_factors, kmo_override
///   [factors.view."aboveground"] indicators = [...], weight = 0.5
struct PipelineConfig {
  std::filesystem::path data;
  std::filesystem::path indicators;
  std::filesystem::path out;
  std::string data_ref;        ///< paths as written, for the config echo
  std::string indicators_ref;
  ClusterMethod method = ClusterMethod::kmeans;
  int k = 3;
  std::uint64_t seed = 0;
  std::string preset = "desk-scale";
  kmeans::Config kmeans;
  cvcl::Config cvcl;
  FactorSettings factors;
  std::optional<ConfigTable> cvcl_table;  ///< kept so a preset change can be re-applied

  /// Propagates k and seed into the method blocks and validates ranges.
  void finalize();
  void set_preset(const std::string& name);
  /// Effective configuration as compact JSON (output directory excluded).
  [[nodiscard]] std::string echo_json() const;
};

PipelineConfig parse_pipeline_config(const std::string& text, const std::filesystem::path& base_dir,
                                     const std::string& source = "<string>");
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// -- table builders ------------------------------------------------------------

report::Table descriptive_table(const DescriptiveStats& d);
report::Table normality_table(const stats::NormalityReport& n);
std::vector<report::Table> correlation_tables(const stats::CorrelationReport& c);
report::Table adequacy_table(const factors::Adequacy& a);
report::Table variance_table(const factors::FactorModel& m);
report::Table loadings_table(const factors::FactorModel& m, const std::vector<IndicatorSpec>& indicators);
report::Table rotated_eigenvalue_table(const factors::FactorModel& m);
report::Table views_table(const factors::ViewPartition& p, const std::vector<IndicatorSpec>& indicators);
report::Table geometry_table(const std::vector<grading::ClusterGeometry>& ordered,
                             const std::vector<IndicatorSpec>& indicators);
report::Table boundary_table(const grading::GradingStandard& s);
report::Table validity_table(const validity::ValidityReport& v);
report::Table training_table(const std::vector<cvcl::EpochRecord>& log);
report::Table grades_table(const grading::GradingStandard& s, const RawDataset& samples,
                           const std::vector<int>* clusters = nullptr);

// -- stage helpers -------------------------------------------------------------

/// Views from manual settings (indicator names) or from the rotated loadings.
factors::ViewPartition resolve_views(const FactorSettings& settings, const factors::FactorModel& model,
                                     const std::vector<IndicatorSpec>& indicators);

/// Geometry of the clustering, ordered best to worst.
std::vector<grading::ClusterGeometry> ordered_geometry(const Eigen::MatrixXd& standardized,
                                                       const ClusteringResult& result);
std::vector<grading::ClusterGeometry> reorder(const std::vector<grading::ClusterGeometry>& geoms);

std::string clustering_json(const ClusteringResult& r);
ClusteringResult clustering_from_json(const std::string& text);

/// Published cluster geometry: {"indicators": [{name, unit, direction,
/// integer, decimals, min, max}], "clusters": [{"center": [...], "radius": r}]}.
/// "indicators" is optional when the caller supplies specs and ranges.
struct InjectedGeometry {
  std::vector<grading::ClusterGeometry> clusters;  ///< file order
  std::vector<IndicatorSpec> indicators;
  std::vector<ScaleParams> scale;
};
InjectedGeometry parse_injected_geometry(const std::string& text);

struct RunArtifacts {
  report::RunReport report;
  StandardizedDataset standardized;
  ClusteringResult clustering;
  std::vector<grading::ClusterGeometry> geometry;  ///< best to worst
  grading::GradingStandard standard;
  std::optional<cvcl::Model> model;
};

/// load -> describe -> normalize -> normality -> correlation -> adequacy ->
/// factors -> views (cvcl) -> cluster -> geometry -> standard -> validity.
/// Failures are rethrown as StageError naming the stage. cvcl runs stop at
/// the adequacy stage when KMO < 0.80 unless factors.kmo_override is set.
RunArtifacts run(const PipelineConfig& cfg);

/// Writes report.json, report.md, scree.svg, standard.json, standard.md,
/// clustering.json and (cvcl) checkpoint.json into `dir`.
std::vector<std::filesystem::path> write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir);

/// run() followed by write_artifacts() into cfg.out when it is set.
report::RunReport run_pipeline(const PipelineConfig& cfg);

}  // namespace sqcsef::pipeline
