#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sqcsef/error.hpp"
#include "sqcsef/pipeline.hpp"
#include "sqcsef/synth.hpp"

namespace fs = std::filesystem;
using namespace sqcsef;

namespace {

struct Options {
  std::string config;
  std::string data;
  std::string indicators;
  std::string out;
  std::string method;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Pipeline config file");
  cmd->add_option("--data", o.data, "Dataset CSV (overrides the config)");
  cmd->add_option("--indicators", o.indicators, "Indicator config (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--method", o.method, "Clustering method: kmeans or cvcl");
  cmd->add_option("--k", o.k, "Number of clusters");
  cmd->add_option("--preset", o.preset, "CVCL architecture preset: paper-scale or desk-scale");
}

pipeline::PipelineConfig resolve(const Options& o) {
  pipeline::PipelineConfig c =
      o.config.empty() ? pipeline::PipelineConfig{} : pipeline::load_pipeline_config(o.config);
  if (!o.data.empty()) c.data = c.data_ref = o.data;
  if (!o.indicators.empty()) c.indicators = c.indicators_ref = o.indicators;
  if (!o.out.empty()) c.out = o.out;
  if (!o.method.empty()) c.method = parse_cluster_method(o.method);
  if (o.seed) c.seed = *o.seed;
  if (o.k) c.k = *o.k;
  if (!o.preset.empty()) c.set_preset(o.preset);
  c.finalize();
  return c;
}

RawDataset load_raw(const pipeline::PipelineConfig& c) {
  if (c.indicators.empty()) throw ConfigError("no indicator config given (use --config or --indicators)");
  if (c.data.empty()) throw ConfigError("no data file given (use --config or --data)");
  return load_csv(c.data, load_indicator_config(c.indicators));
}

void emit(const std::vector<report::Table>& tables, const std::string& out) {
  report::RunReport r;
  r.tables = tables;
  for (const auto& t : tables) std::cout << "## " << t.title << "\n\n" << report::table_markdown(t) << "\n";
  if (!out.empty()) report::render(r, report::Format::csv_bundle, out);
}

int cmd_describe(const Options& o) {
  const auto raw = load_raw(resolve(o));
  emit({pipeline::descriptive_table(describe(raw))}, o.out);
  return 0;
}

int cmd_correlate(const Options& o) {
  const auto raw = load_raw(resolve(o));
  const auto norm = stats::normality(raw);
  std::vector<report::Table> tables{pipeline::normality_table(norm)};
  for (auto& t : pipeline::correlation_tables(stats::correlation_report(raw, norm))) tables.push_back(std::move(t));
  emit(tables, o.out);
  return 0;
}

int cmd_factor(const Options& o) {
  const auto cfg = resolve(o);
  const auto raw = load_raw(cfg);
  const Eigen::MatrixXd corr = stats::pearson_matrix(raw.rows());
  const auto ad = factors::adequacy(corr, raw.samples());
  const auto model = factors::extract_factors(corr, std::min(cfg.factors.n_factors, static_cast<int>(raw.size())));
  const auto guide = factors::factor_count_guidance(model.eigenvalues);
  const auto views = pipeline::resolve_views(cfg.factors, model, raw.indicators());
  emit({pipeline::adequacy_table(ad), pipeline::variance_table(model), pipeline::loadings_table(model, raw.indicators()),
        pipeline::rotated_eigenvalue_table(model), pipeline::views_table(views, raw.indicators())},
       o.out);
  std::cout << fmt::format("Factor count guidance: cumulative >= 80%: {}, Kaiser: {}, scree elbow: {}\n",
                           guide.cumulative_80, guide.kaiser, guide.scree_elbow);
  if (ad.kmo < factors::kKmoThreshold) std::cout << fmt::format("warning: KMO {:.4f} below 0.80\n", ad.kmo);
  for (const auto& w : views.warnings) std::cout << "warning: " << w << "\n";
  if (!o.out.empty()) {
    report::write_text(fs::path(o.out) / "scree.svg", factors::scree_svg(model.eigenvalues));
    report::write_text(fs::path(o.out) / "scree.csv", factors::scree_csv(model.eigenvalues));
  }
  return 0;
}

int cmd_cluster(const Options& o) {
  const auto cfg = resolve(o);
  const auto a = pipeline::run(cfg);
  std::cout << pipeline::clustering_json(a.clustering);
  for (const auto& w : a.clustering.warnings) std::cerr << "warning: " << w << "\n";
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    report::write_text(fs::path(o.out) / "clustering.json", pipeline::clustering_json(a.clustering));
    if (a.model) cvcl::save_checkpoint(*a.model, fs::path(o.out) / "checkpoint.json");
  }
  return 0;
}

int cmd_standard(const Options& o, const std::string& inject, const std::string& clustering) {
  grading::GradingStandard standard;
  std::vector<grading::ClusterGeometry> ordered;
  if (!inject.empty()) {
    auto g = pipeline::parse_injected_geometry(report::read_text(inject));
    if (g.indicators.empty()) {
      const auto d = normalize(load_raw(resolve(o)));
      g.indicators = d.indicators;
      g.scale = d.scale;
    }
    ordered = pipeline::reorder(g.clusters);
    standard = grading::build_standard(ordered, g.indicators, g.scale, "injected geometry: " + inject);
  } else if (!clustering.empty()) {
    const auto cfg = resolve(o);
    const auto d = normalize(load_raw(cfg));
    const auto c = pipeline::clustering_from_json(report::read_text(clustering));
    ordered = pipeline::ordered_geometry(d.matrix, c);
    standard = grading::build_standard(ordered, d, "clustering: " + clustering);
  } else {
    const auto a = pipeline::run(resolve(o));
    ordered = a.geometry;
    standard = a.standard;
  }
  std::cout << report::table_markdown(pipeline::boundary_table(standard)) << "\n"
            << grading::standard_markdown(standard);
  for (const auto& w : standard.warnings) std::cerr << "warning: " << w << "\n";
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    report::write_text(fs::path(o.out) / "standard.json", grading::standard_json(standard));
    report::write_text(fs::path(o.out) / "standard.md", grading::standard_markdown(standard));
  }
  return 0;
}

int cmd_grade(const Options& o, const std::string& standard_path, const std::string& samples) {
  const auto standard = grading::standard_from_json(report::read_text(standard_path));
  const auto raw = load_csv(samples, standard.indicators);
  const auto table = pipeline::grades_table(standard, raw);
  std::cout << report::table_csv(table);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    report::write_text(fs::path(o.out) / "grades.csv", report::table_csv(table));
  }
  return 0;
}

int cmd_report(const Options& o, const std::string& from, const std::string& format) {
  if (from.empty()) {
    auto cfg = resolve(o);
    if (cfg.out.empty()) throw ConfigError("report needs --out or an 'out' entry in the config");
    const auto a = pipeline::run(cfg);
    for (const auto& p : pipeline::write_artifacts(a, cfg.out)) std::cout << p.string() << "\n";
    if (format != "markdown" && format != "json") {
      for (const auto& p : report::render(a.report, report::parse_format(format), cfg.out)) std::cout << p.string() << "\n";
    }
    return 0;
  }
  if (o.out.empty()) throw ConfigError("report --from needs --out");
  const report::RunReport r = fs::is_directory(from) ? report::read_csv_bundle(from)
                                                      : report::from_json(report::read_text(from));
  for (const auto& p : report::render(r, report::parse_format(format), o.out)) std::cout << p.string() << "\n";
  return 0;
}

int cmd_synth(const Options& o, int samples) {
  if (o.out.empty()) throw ConfigError("synth needs --out");
  const auto spec = synth::Spec::seedling_preset(o.seed.value_or(0), samples);
  const auto raw = synth::generate(spec);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  report::write_text(dir / "seedlings.csv", format_csv(raw));
  report::write_text(dir / "indicators.toml", format_indicator_config(raw.indicators()));
  report::write_text(dir / "pipeline.toml",
                     fmt::format("data = \"seedlings.csv\"\nindicators = \"indicators.toml\"\nmethod = \"kmeans\"\n"
                                 "k = 3\nseed = {}\nout = \"run\"\n",
                                 spec.seed));
  std::cout << (dir / "seedlings.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seedling quality classification standard establishment"};
  app.require_subcommand(1);
  Options o;
  std::string inject, clustering, standard_path, samples_path, from, format = "markdown";
  int synth_samples = 200;

  auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics of the dataset");
  auto* correlate_cmd = app.add_subcommand("correlate", "Normality tests and correlation tables");
  auto* factor_cmd = app.add_subcommand("factor", "KMO/Bartlett, factor extraction, varimax and views");
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster the standardized data");
  auto* standard_cmd = app.add_subcommand("standard", "Build a grading standard");
  auto* grade_cmd = app.add_subcommand("grade", "Grade samples against a saved standard");
  auto* report_cmd = app.add_subcommand("report", "Run the full pipeline or re-render a saved report");
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic seedling dataset");
  for (auto* cmd : {describe_cmd, correlate_cmd, factor_cmd, cluster_cmd, standard_cmd, grade_cmd, report_cmd, synth_cmd}) {
    add_common(cmd, o);
  }
  standard_cmd->add_option("--inject-geometry", inject, "JSON of cluster centers and radii");
  standard_cmd->add_option("--clustering", clustering, "Saved clustering.json");
  grade_cmd->add_option("--standard", standard_path, "Saved standard.json")->required();
  grade_cmd->add_option("--samples", samples_path, "CSV of samples to grade")->required();
  report_cmd->add_option("--from", from, "Saved report.json or CSV bundle directory");
  report_cmd->add_option("--format", format, "markdown, json or csv-bundle");
  synth_cmd->add_option("--samples", synth_samples, "Number of rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*describe_cmd) return cmd_describe(o);
    if (*correlate_cmd) return cmd_correlate(o);
    if (*factor_cmd) return cmd_factor(o);
    if (*cluster_cmd) return cmd_cluster(o);
    if (*standard_cmd) return cmd_standard(o, inject, clustering);
    if (*grade_cmd) return cmd_grade(o, standard_path, samples_path);
    if (*report_cmd) return cmd_report(o, from, format);
    if (*synth_cmd) return cmd_synth(o, synth_samples);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
