#include "sqcsef/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "sqcsef/error.hpp"

namespace sqcsef::pipeline {

using json = nlohmann::ordered_json;
using report::Cell;
using report::Table;

// -- configuration -----------------------------------------------------------

namespace {

void apply_cvcl_table(cvcl::Config& c, const ConfigTable& t) {
  c.alpha = t.get_double("alpha", c.alpha);
  c.beta = t.get_double("beta", c.beta);
  c.lr = t.get_double("lr", c.lr);
  c.pre_epochs = static_cast<int>(t.get_int("pre_epochs", c.pre_epochs));
  c.train_epochs = static_cast<int>(t.get_int("train_epochs", c.train_epochs));
  c.latent_dim = static_cast<int>(t.get_int("latent_dim", c.latent_dim));
  const auto widths = [&](const char* key, std::vector<int>& dst) {
    if (!t.has(key)) return;
    dst.clear();
    for (auto w : t.get_int_list(key)) dst.push_back(static_cast<int>(w));
  };
  widths("encoder_hidden", c.encoder_hidden);
  widths("head_hidden", c.head_hidden);
}

void check_keys(const ConfigTable& t, std::initializer_list<const char*> allowed, const std::string& source) {
  for (const auto& [key, value] : t.entries) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      const std::string where = t.path.empty() ? "top level" : "[" + t.display_name() + "]";
      throw ConfigError(fmt::format("{}: unknown key '{}' at {}", source, key, where));
    }
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

}  // namespace

void PipelineConfig::set_preset(const std::string& name) {
  const int k_keep = cvcl.k;
  const auto seed_keep = cvcl.seed;
  cvcl = cvcl::preset(name);
  cvcl.k = k_keep;
  cvcl.seed = seed_keep;
  preset = name;
  if (cvcl_table) apply_cvcl_table(cvcl, *cvcl_table);
}

void PipelineConfig::finalize() {
  if (k < 2) throw ConfigError(fmt::format("k must be at least 2 to build a grading standard, got {}", k));
  kmeans.k = k;
  kmeans.seed = seed;
  cvcl.k = k;
  cvcl.seed = seed;
  if (kmeans.n_restarts < 1) throw ConfigError("kmeans.n_restarts must be positive");
  if (kmeans.max_iter < 1) throw ConfigError("kmeans.max_iter must be positive");
  if (!(kmeans.tol > 0.0)) throw ConfigError("kmeans.tol must be positive");
  if (factors.n_factors < 1) throw ConfigError("factors.n_factors must be positive");
  if (method == ClusterMethod::cvcl) cvcl.validate();
}

std::string PipelineConfig::echo_json() const {
  json j;
  j["data"] = data_ref;
  j["indicators"] = indicators_ref;
  j["method"] = to_string(method);
  j["k"] = k;
  j["seed"] = seed;
  j["kmeans"] = {{"tol", kmeans.tol},
                 {"max_iter", kmeans.max_iter},
                 {"n_restarts", kmeans.n_restarts},
                 {"init", kmeans.init == kmeans::Init::random_rows ? "random" : "kmeans++"}};
  if (method == ClusterMethod::cvcl) {
    j["preset"] = preset;
    j["cvcl"] = {{"encoder_hidden", cvcl.encoder_hidden}, {"latent_dim", cvcl.latent_dim},
                 {"head_hidden", cvcl.head_hidden},       {"alpha", cvcl.alpha},
                 {"beta", cvcl.beta},                     {"lr", cvcl.lr},
                 {"pre_epochs", cvcl.pre_epochs},         {"train_epochs", cvcl.train_epochs}};
  }
  json views = json::array();
  for (const auto& v : factors.manual_views) {
    views.push_back({{"name", v.name}, {"indicators", v.indicators}, {"weight", v.weight}});
  }
  j["factors"] = {{"n_factors", factors.n_factors}, {"kmo_override", factors.kmo_override}, {"views", views}};
  return j.dump();
}

PipelineConfig parse_pipeline_config(const std::string& text, const std::filesystem::path& base_dir,
                                     const std::string& source) {
  const ConfigDocument doc = parse_config(text, source);
  PipelineConfig c;
  const auto& root = doc.root;
  check_keys(root, {"data", "indicators", "out", "method", "k", "seed", "preset"}, source);
  for (const auto& t : doc.tables) {
    const bool view = t.path.size() == 3 && t.path[0] == "factors" && t.path[1] == "view";
    if (view) {
      check_keys(t, {"indicators", "weight"}, source);
    } else if (t.path == std::vector<std::string>{"kmeans"}) {
      check_keys(t, {"tol", "max_iter", "n_restarts", "init"}, source);
    } else if (t.path == std::vector<std::string>{"cvcl"}) {
      check_keys(t, {"alpha", "beta", "lr", "pre_epochs", "train_epochs", "encoder_hidden", "latent_dim", "head_hidden"},
                 source);
    } else if (t.path == std::vector<std::string>{"factors"}) {
      check_keys(t, {"n_factors", "kmo_override"}, source);
    } else {
      throw ConfigError(fmt::format("{}:{}: unknown table [{}]", source, t.line, t.display_name()));
    }
  }
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (root.has("data")) {
    c.data_ref = root.get_string("data");
    c.data = resolve(c.data_ref);
  }
  if (root.has("indicators")) {
    c.indicators_ref = root.get_string("indicators");
    c.indicators = resolve(c.indicators_ref);
  }
  if (root.has("out")) c.out = resolve(root.get_string("out"));
  c.method = parse_cluster_method(root.get_string("method", "kmeans"));
  c.k = static_cast<int>(root.get_int("k", 3));
  const auto seed = root.get_int("seed", 0);
  if (seed < 0) throw ConfigError(source + ": seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);

  if (const auto* t = doc.table({"kmeans"})) {
    c.kmeans.tol = t->get_double("tol", c.kmeans.tol);
    c.kmeans.max_iter = static_cast<int>(t->get_int("max_iter", c.kmeans.max_iter));
    c.kmeans.n_restarts = static_cast<int>(t->get_int("n_restarts", c.kmeans.n_restarts));
    const auto init = t->get_string("init", "random");
    if (init == "random") {
      c.kmeans.init = kmeans::Init::random_rows;
    } else if (init == "kmeans++") {
      c.kmeans.init = kmeans::Init::kmeans_plus_plus;
    } else {
      throw ConfigError(source + ": kmeans.init must be \"random\" or \"kmeans++\"");
    }
  }
  if (const auto* t = doc.table({"cvcl"})) c.cvcl_table = *t;
  c.set_preset(root.get_string("preset", "desk-scale"));

  if (const auto* t = doc.table({"factors"})) {
    c.factors.n_factors = static_cast<int>(t->get_int("n_factors", c.factors.n_factors));
    c.factors.kmo_override = t->get_bool("kmo_override", false);
  }
  for (const auto& t : doc.tables) {
    if (t.path.size() == 3 && t.path[0] == "factors" && t.path[1] == "view") {
      ManualView v;
      v.name = t.path[2];
      v.indicators = t.get_string_list("indicators");
      v.weight = t.get_double("weight", 0.0);
      c.factors.manual_views.push_back(std::move(v));
    }
  }
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = report::read_text(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open pipeline config " + path.string());
  }
  return parse_pipeline_config(text, path.parent_path(), path.string());
}

// -- tables ------------------------------------------------------------------

Table descriptive_table(const DescriptiveStats& d) {
  Table t{"descriptive", "Descriptive statistics", {"Indicator", "Min", "Max", "Mean", "Std"}, {}, 4, {}};
  for (std::size_t i = 0; i < d.names.size(); ++i) {
    const auto& s = d.columns[i];
    t.rows.push_back({d.names[i], s.min, s.max, s.mean, s.std});
  }
  return t;
}

Table normality_table(const stats::NormalityReport& n) {
  Table t{"normality",
          "Jarque-Bera normality test",
          {"Indicator", "JB statistic", "p-value", "Skewness", "Kurtosis", "Normal at 1%"},
          {},
          4, {}};
  for (const auto& e : n.entries) {
    t.rows.push_back({e.name, e.jb.statistic, e.jb.p_value, e.jb.skewness, e.jb.kurtosis,
                      std::string(e.normal_at_99 ? "yes" : "no")});
  }
  return t;
}

std::vector<Table> correlation_tables(const stats::CorrelationReport& c) {
  std::vector<std::string> columns{"Indicator"};
  columns.insert(columns.end(), c.names.begin(), c.names.end());
  Table coef{"correlation", "Correlation coefficients (*** p<0.01, ** p<0.05, * p<0.1)", columns, {}, 4, {}};
  Table p{"correlation_p", "Correlation p-values", columns, {}, 4, {}};
  Table method{"correlation_method", "Correlation method per pair", columns, {}, 4, {}};
  const auto n = static_cast<Eigen::Index>(c.names.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Cell> rc{c.names[static_cast<std::size_t>(i)]}, rp = rc, rm = rc;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = c.coefficient(i, j);
      rc.emplace_back(std::isnan(r) ? std::string("n/a") : fmt::format("{:.4f}{}", r, c.stars(i, j)));
      rp.emplace_back(c.p_value(i, j));
      rm.emplace_back(stats::to_string(c.method[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
    coef.rows.push_back(std::move(rc));
    p.rows.push_back(std::move(rp));
    method.rows.push_back(std::move(rm));
  }
  return {coef, p, method};
}

Table adequacy_table(const factors::Adequacy& a) {
  Table t{"adequacy", "KMO and Bartlett's test", {"Statistic", "Value"}, {}, 4, {}};
  t.rows.push_back({std::string("Kaiser-Meyer-Olkin measure"), a.kmo});
  t.rows.push_back({std::string("Bartlett chi-square"), a.bartlett_chi2});
  t.rows.push_back({std::string("Bartlett degrees of freedom"), static_cast<double>(a.bartlett_dof)});
  t.rows.push_back({std::string("Bartlett p-value"), a.bartlett_p});
  return t;
}

Table variance_table(const factors::FactorModel& m) {
  Table t{"variance", "Total variance explained", {"Component", "Eigenvalue", "% of Variance", "Cumulative %"}, {}, 3, {0}};
  for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i) {
    t.rows.push_back({static_cast<double>(i + 1), m.eigenvalues[i], m.variance.percent[i], m.variance.cumulative[i]});
  }
  return t;
}

Table loadings_table(const factors::FactorModel& m, const std::vector<IndicatorSpec>& indicators) {
  Table t{"rotated_loadings", "Rotated factor loadings", {"Indicator"}, {}, 3, {}};
  for (int f = 0; f < m.n_factors; ++f) t.columns.push_back(fmt::format("Factor {}", f + 1));
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    std::vector<Cell> row{indicators[i].name};
    for (int f = 0; f < m.n_factors; ++f) row.emplace_back(m.rotated_loadings(static_cast<Eigen::Index>(i), f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table rotated_eigenvalue_table(const factors::FactorModel& m) {
  Table t{"rotated_eigenvalues", "Rotated eigenvalues", {"Factor", "Rotated eigenvalue", "Share"}, {}, 4, {0}};
  const double total = m.rotated_eigenvalues.sum();
  for (Eigen::Index f = 0; f < m.rotated_eigenvalues.size(); ++f) {
    t.rows.push_back({static_cast<double>(f + 1), m.rotated_eigenvalues[f], m.rotated_eigenvalues[f] / total});
  }
  return t;
}

Table views_table(const factors::ViewPartition& p, const std::vector<IndicatorSpec>& indicators) {
  Table t{"views", "Views and weights", {"View", "Indicators", "Weight"}, {}, 4, {}};
  for (std::size_t v = 0; v < p.views.size(); ++v) {
    std::vector<std::string> names;
    for (int i : p.views[v].indicators) names.push_back(indicators[static_cast<std::size_t>(i)].name);
    t.rows.push_back({p.views[v].name, fmt::format("{}", fmt::join(names, "; ")), p.weights[v]});
  }
  return t;
}

Table geometry_table(const std::vector<grading::ClusterGeometry>& ordered, const std::vector<IndicatorSpec>& indicators) {
  Table t{"clusters", "Centers and radiuses of clusters", {"Cluster", "Source index", "Size"}, {}, 4, {-1, 0, 0}};
  for (const auto& spec : indicators) t.columns.push_back(spec.name);
  t.columns.push_back("Radius");
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& g = ordered[i];
    std::vector<Cell> row{fmt::format("C{}", i + 1), static_cast<double>(g.cluster), static_cast<double>(g.size)};
    for (Eigen::Index k = 0; k < g.center.size(); ++k) row.emplace_back(g.center[k]);
    row.emplace_back(g.radius);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table boundary_table(const grading::GradingStandard& s) {
  Table t{"boundary_points", "Boundary points (standardized lower bounds)", {"Level"}, {}, 4, {}};
  for (const auto& spec : s.indicators) t.columns.push_back(spec.name);
  for (const auto& level : s.levels) {
    if (level.thresholds.empty()) continue;
    std::vector<Cell> row{level.name};
    for (const auto& th : level.thresholds) row.emplace_back(th.standardized);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table validity_table(const validity::ValidityReport& v) {
  Table t{"validity",
          "Internal evaluation of clusters",
          {"Method", "Silhouette Index", "Calinski-Harabasz Index", "Davies-Bouldin Index"},
          {},
          4, {}};
  t.rows.push_back({std::string(v.method == ClusterMethod::kmeans ? "K-Means" : "CVCL"), v.silhouette,
                    v.calinski_harabasz.value, v.davies_bouldin});
  return t;
}

Table training_table(const std::vector<cvcl::EpochRecord>& log) {
  Table t{"training_log", "Training log", {"Epoch", "Stage", "L_pre", "L_c", "L_a", "L"}, {}, 6, {0}};
  for (const auto& r : log) {
    t.rows.push_back({static_cast<double>(r.epoch), std::string(r.stage == cvcl::Stage::pretrain ? "pretrain" : "train"),
                      r.pre, r.contrastive, r.regularizer, r.total});
  }
  return t;
}

Table grades_table(const grading::GradingStandard& s, const RawDataset& samples, const std::vector<int>* clusters) {
  Table t{"grades", "Sample grades", {"Sample"}, {}, 0, {}};
  if (clusters != nullptr) t.columns.push_back("Cluster");
  t.columns.push_back("Level");
  for (std::size_t i = 0; i + 1 < s.levels.size(); ++i) t.columns.push_back("Met " + s.levels[i].name);
  std::vector<double> row_values(static_cast<std::size_t>(samples.size()));
  for (Eigen::Index i = 0; i < samples.samples(); ++i) {
    for (Eigen::Index k = 0; k < samples.size(); ++k) row_values[static_cast<std::size_t>(k)] = samples.rows()(i, k);
    const auto g = grading::grade_sample(s, row_values);
    std::vector<Cell> row{static_cast<double>(i + 1)};
    if (clusters != nullptr) row.emplace_back(static_cast<double>((*clusters)[static_cast<std::size_t>(i)]));
    row.emplace_back(g.name);
    for (int met : g.conditions_met) row.emplace_back(static_cast<double>(met));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// -- stage helpers -----------------------------------------------------------

factors::ViewPartition resolve_views(const FactorSettings& settings, const factors::FactorModel& model,
                                     const std::vector<IndicatorSpec>& indicators) {
  if (settings.manual_views.empty()) return factors::partition_views(model);
  std::vector<factors::View> views;
  std::vector<double> weights;
  for (const auto& mv : settings.manual_views) {
    factors::View v{mv.name, {}};
    for (const auto& name : mv.indicators) {
      const auto it = std::find_if(indicators.begin(), indicators.end(),
                                   [&](const IndicatorSpec& s) { return s.name == name; });
      if (it == indicators.end()) throw ConfigError("view '" + mv.name + "' names unknown indicator '" + name + "'");
      v.indicators.push_back(static_cast<int>(it - indicators.begin()));
    }
    views.push_back(std::move(v));
    weights.push_back(mv.weight);
  }
  return factors::manual_partition(std::move(views), std::move(weights), static_cast<int>(indicators.size()));
}

std::vector<grading::ClusterGeometry> reorder(const std::vector<grading::ClusterGeometry>& geoms) {
  std::vector<grading::ClusterGeometry> out;
  for (int i : grading::order_clusters(geoms)) out.push_back(geoms[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<grading::ClusterGeometry> ordered_geometry(const Eigen::MatrixXd& standardized,
                                                       const ClusteringResult& result) {
  return reorder(grading::cluster_geometry(standardized, result));
}

std::string clustering_json(const ClusteringResult& r) {
  json j;
  j["format"] = "sqcsef-clustering";
  j["version"] = 1;
  j["method"] = to_string(r.method);
  j["k"] = r.k();
  j["inertia"] = r.inertia;
  j["iterations"] = r.iterations;
  j["assignments"] = r.assignments;
  j["centroids"] = json::array();
  for (Eigen::Index c = 0; c < r.centroids.rows(); ++c) {
    json row = json::array();
    for (Eigen::Index k = 0; k < r.centroids.cols(); ++k) row.push_back(r.centroids(c, k));
    j["centroids"].push_back(std::move(row));
  }
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

ClusteringResult clustering_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "sqcsef-clustering") throw DataError("clustering: unexpected format tag");
    ClusteringResult r;
    r.method = parse_cluster_method(j.at("method").get<std::string>());
    r.inertia = j.at("inertia").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.assignments = j.at("assignments").get<std::vector<int>>();
    const auto rows = j.at("centroids").get<std::vector<std::vector<double>>>();
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    r.centroids.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t c = 0; c < rows.size(); ++c) {
      if (rows[c].size() != cols) throw DataError("clustering: ragged centroid matrix");
      for (std::size_t k = 0; k < cols; ++k) {
        r.centroids(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = rows[c][k];
      }
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("clustering: ") + e.what());
  }
}

InjectedGeometry parse_injected_geometry(const std::string& text) {
  try {
    const json j = json::parse(text);
    InjectedGeometry g;
    if (j.contains("indicators")) {
      for (const auto& ij : j.at("indicators")) {
        IndicatorSpec spec;
        spec.name = ij.at("name").get<std::string>();
        spec.unit = ij.value("unit", std::string());
        spec.direction = parse_direction(ij.value("direction", std::string("maximize")));
        spec.integer_valued = ij.value("integer", false);
        spec.decimals = ij.value("decimals", -1);
        g.scale.push_back(scale_params_from_range(spec, ij.at("min").get<double>(), ij.at("max").get<double>()));
        g.indicators.push_back(std::move(spec));
      }
    }
    int index = 0;
    for (const auto& cj : j.at("clusters")) {
      const auto center = cj.at("center").get<std::vector<double>>();
      g.clusters.push_back(grading::injected_geometry(
          index++, Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(center.size())),
          cj.at("radius").get<double>()));
    }
    if (g.clusters.empty()) throw DataError("injected geometry: no clusters");
    return g;
  } catch (const json::exception& e) {
    throw DataError(std::string("injected geometry: ") + e.what());
  }
}

// -- run ---------------------------------------------------------------------

RunArtifacts run(const PipelineConfig& input) {
  PipelineConfig cfg = input;
  cfg.finalize();
  RunArtifacts a;
  auto& rep = a.report;
  rep.config_echo = cfg.echo_json();
  rep.provenance = fmt::format("method={} k={} seed={} config={:016x}", to_string(cfg.method), cfg.k, cfg.seed,
                               fnv1a(rep.config_echo));

  const RawDataset raw = stage("load", [&] {
    if (cfg.indicators.empty()) throw ConfigError("no indicator config given");
    if (cfg.data.empty()) throw ConfigError("no data file given");
    return load_csv(cfg.data, load_indicator_config(cfg.indicators));
  });
  const auto& specs = raw.indicators();
  rep.tables.push_back(stage("describe", [&] { return descriptive_table(describe(raw)); }));
  a.standardized = stage("normalize", [&] { return normalize(raw); });
  const auto norm = stage("normality", [&] { return stats::normality(raw); });
  rep.tables.push_back(normality_table(norm));
  stage("correlation", [&] {
    for (auto& t : correlation_tables(stats::correlation_report(raw, norm))) rep.tables.push_back(std::move(t));
    return 0;
  });
  const Eigen::MatrixXd corr = stats::pearson_matrix(raw.rows());
  const auto adequacy = stage("adequacy", [&]() -> std::optional<factors::Adequacy> {
    factors::Adequacy ad;
    try {
      ad = factors::adequacy(corr, raw.samples());
    } catch (const NumericError& e) {
      if (cfg.method == ClusterMethod::cvcl) throw;
      rep.warnings.push_back(std::string("adequacy skipped: ") + e.what());
      return std::nullopt;
    }
    if (ad.kmo < factors::kKmoThreshold) {
      const auto msg = fmt::format("KMO {:.4f} is below the {:.2f} adequacy gate", ad.kmo, factors::kKmoThreshold);
      if (cfg.method == ClusterMethod::cvcl && !cfg.factors.kmo_override) {
        throw DataError(msg + "; set factors.kmo_override to proceed");
      }
      rep.warnings.push_back(msg);
    }
    return ad;
  });
  if (adequacy) rep.tables.push_back(adequacy_table(*adequacy));
  const auto model = stage("factors", [&] {
    const int n = std::min(cfg.factors.n_factors, static_cast<int>(raw.size()));
    return factors::extract_factors(corr, n);
  });
  rep.tables.push_back(variance_table(model));
  rep.tables.push_back(loadings_table(model, specs));
  rep.tables.push_back(rotated_eigenvalue_table(model));

  if (cfg.method == ClusterMethod::kmeans) {
    a.clustering = stage("cluster", [&] { return kmeans::fit(a.standardized.matrix, cfg.kmeans); });
  } else {
    const auto partition = stage("views", [&] { return resolve_views(cfg.factors, model, specs); });
    for (const auto& w : partition.warnings) rep.warnings.push_back(w);
    rep.tables.push_back(views_table(partition, specs));
    a.clustering = stage("cluster", [&] {
      auto c = cfg.cvcl;
      c.view_weights = partition.weights;
      const auto views = cvcl::build_views(a.standardized, partition);
      auto m = cvcl::train(cvcl::pretrain(cvcl::init_model(views, c), views, c), views, c);
      auto result = cvcl::assign(m, views, partition.weights, a.standardized.matrix);
      a.model = std::move(m);
      return result;
    });
    rep.tables.push_back(training_table(a.model->log));
  }
  for (const auto& w : a.clustering.warnings) rep.warnings.push_back(w);

  a.geometry = stage("geometry", [&] { return ordered_geometry(a.standardized.matrix, a.clustering); });
  rep.tables.push_back(geometry_table(a.geometry, specs));
  a.standard = stage("standard", [&] { return grading::build_standard(a.geometry, a.standardized, rep.provenance); });
  for (const auto& w : a.standard.warnings) rep.warnings.push_back(w);
  rep.tables.push_back(boundary_table(a.standard));
  rep.standard = a.standard;

  stage("validity", [&] {
    if (a.clustering.k() >= 2 && a.clustering.k() < raw.samples()) {
      auto v = validity::evaluate(a.standardized.matrix, a.clustering);
      if (v.calinski_harabasz.infinite) rep.warnings.push_back("Calinski-Harabasz index is infinite (zero dispersion)");
      rep.tables.push_back(validity_table(v));
    } else {
      rep.warnings.push_back("validity indices need 2 <= k <= M - 1; skipped");
    }
    return 0;
  });
  rep.tables.push_back(grades_table(a.standard, raw, &a.clustering.assignments));
  return a;
}

std::vector<std::filesystem::path> write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir) {
  return stage("write", [&] {
    auto written = report::render(a.report, report::Format::json, dir);
    for (auto& p : report::render(a.report, report::Format::markdown, dir)) written.push_back(std::move(p));
    const auto emit = [&](const char* name, const std::string& text) {
      written.push_back(dir / name);
      report::write_text(written.back(), text);
    };
    emit("standard.json", grading::standard_json(a.standard));
    emit("standard.md", grading::standard_markdown(a.standard));
    emit("clustering.json", clustering_json(a.clustering));
    if (a.model) emit("checkpoint.json", cvcl::checkpoint_json(*a.model));
    return written;
  });
}

report::RunReport run_pipeline(const PipelineConfig& cfg) {
  auto a = run(cfg);
  if (!cfg.out.empty()) write_artifacts(a, cfg.out);
  return a.report;
}

}  // namespace sqcsef::pipeline
