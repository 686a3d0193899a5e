#include <doctest.h>

#include <map>

#include "fixture.hpp"
#include "sqcsef/error.hpp"
#include "sqcsef/pipeline.hpp"

using namespace sqcsef;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = report::read_text(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = pipeline::parse_pipeline_config(
      "data = \"d.csv\"\nindicators = \"i.toml\"\nmethod = \"cvcl\"\nk = 4\nseed = 9\n"
      "[kmeans]\nn_restarts = 5\ninit = \"kmeans++\"\n[cvcl]\nalpha = 0.5\n"
      "[factors.view.\"a\"]\nindicators = [\"x\"]\nweight = 1.0\n",
      "/base");
  cfg.finalize();
  CHECK(cfg.data == fs::path("/base/d.csv"));
  CHECK(cfg.method == ClusterMethod::cvcl);
  CHECK(cfg.k == 4);
  CHECK(cfg.kmeans.k == 4);
  CHECK(cfg.kmeans.n_restarts == 5);
  CHECK(cfg.kmeans.init == kmeans::Init::kmeans_plus_plus);
  CHECK(cfg.cvcl.alpha == 0.5);
  CHECK(cfg.cvcl.seed == 9);
  REQUIRE(cfg.factors.manual_views.size() == 1);
  CHECK(cfg.factors.manual_views[0].name == "a");
  CHECK_THROWS_AS(pipeline::parse_pipeline_config("k = 1\n", "/").finalize(), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_pipeline_config("[extra]\nx = 1\n", "/"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_pipeline_config("[kmeans]\nrestarts = 1\n", "/"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_pipeline_config("method = \"dbscan\"\n", "/"), ConfigError);
  CHECK_THROWS_AS(pipeline::parse_pipeline_config("bogus = 1\n", "/"), ConfigError);
}

TEST_CASE("kmeans run on the synthetic preset") {
  const auto dir = fixture::scratch("pipeline_kmeans");
  fixture::write_synthetic(dir, 7);
  const auto a = pipeline::run(pipeline::load_pipeline_config(dir / "pipeline.toml"));
  REQUIRE(a.standard.levels.size() == 3);
  // Level I thresholds are at least as demanding as level II.
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& t1 = a.standard.levels[0].thresholds[k];
    const auto& t2 = a.standard.levels[1].thresholds[k];
    if (t1.relation == grading::Relation::at_least) {
      CHECK(t1.exact_value >= t2.exact_value);
    } else {
      CHECK(t1.exact_value <= t2.exact_value);
    }
  }
  CHECK(a.report.find("variance") != nullptr);
  CHECK(a.report.find("validity") != nullptr);
  CHECK(a.report.find("clusters") != nullptr);
  CHECK_FALSE(a.model.has_value());

  const auto table = pipeline::grades_table(a.standard, load_csv(dir / "seedlings.csv", a.standard.indicators));
  CHECK(table.rows.size() == 200);
  fs::remove_all(dir);
}

TEST_CASE("identical runs write identical artifacts") {
  const auto dir = fixture::scratch("pipeline_determinism");
  fixture::write_synthetic(dir, 3);
  auto cfg = pipeline::load_pipeline_config(dir / "pipeline.toml");
  cfg.out = dir / "a";
  pipeline::run_pipeline(cfg);
  cfg.out = dir / "b";
  pipeline::run_pipeline(cfg);
  const auto a = snapshot(dir / "a");
  CHECK(a.size() >= 6);
  CHECK(a == snapshot(dir / "b"));
  fs::remove_all(dir);
}

TEST_CASE("a degenerate clustering names its stage") {
  const auto dir = fixture::scratch("pipeline_degenerate");
  std::string csv = "a,b,c\n";
  for (int i = 0; i < 10; ++i) csv += i % 2 ? "1,2,3\n" : "4,1,7\n";
  report::write_text(dir / "d.csv", csv);
  report::write_text(dir / "i.toml", "[indicator.a]\n[indicator.b]\n[indicator.c]\n");
  pipeline::PipelineConfig cfg;
  cfg.data = dir / "d.csv";
  cfg.indicators = dir / "i.toml";
  cfg.finalize();
  try {
    (void)pipeline::run(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    INFO(e.what());
    CHECK(e.exit_code() == 4);
    CHECK(std::string(e.what()).find("stage '") == 0);
  }
  fs::remove_all(dir);
}

TEST_CASE("command line") {
  const auto dir = fixture::scratch("pipeline_cli");
  const auto log = dir / "log.txt";
  CHECK(fixture::run_cli("synth --seed 5 --out " + (dir / "in").string(), log) == 0);
  const auto inputs = snapshot(dir / "in");
  const std::string cfg = (dir / "in" / "pipeline.toml").string();

  CHECK(fixture::run_cli("describe --config " + cfg, log) == 0);
  CHECK(report::read_text(log).find("Seedling Height") != std::string::npos);
  CHECK(fixture::run_cli("correlate --config " + cfg, log) == 0);
  CHECK(fixture::run_cli("factor --config " + cfg, log) == 0);
  CHECK(fixture::run_cli("cluster --config " + cfg + " --out " + (dir / "c").string(), log) == 0);
  CHECK(fixture::run_cli("standard --config " + cfg + " --clustering " + (dir / "c" / "clustering.json").string() +
                             " --out " + (dir / "s").string(),
                         log) == 0);
  CHECK(fixture::run_cli("grade --standard " + (dir / "s" / "standard.json").string() + " --samples " +
                             (dir / "in" / "seedlings.csv").string(),
                         log) == 0);
  const std::string grades = report::read_text(log);
  std::size_t lines = 0;
  for (char ch : grades) lines += ch == '\n';
  CHECK(lines == 201);

  CHECK(fixture::run_cli("report --config " + cfg + " --out " + (dir / "r").string(), log) == 0);
  CHECK(fs::exists(dir / "r" / "report.md"));
  CHECK(fixture::run_cli("report --from " + (dir / "r" / "report.json").string() + " --format csv-bundle --out " +
                             (dir / "b").string(),
                         log) == 0);
  CHECK(fixture::run_cli("report --from " + (dir / "b").string() + " --format markdown --out " +
                             (dir / "m").string(),
                         log) == 0);
  CHECK(report::read_text(dir / "m" / "report.md") == report::read_text(dir / "r" / "report.md"));

  CHECK(fixture::run_cli("cluster --config " + cfg + " --k 1", log) == 2);
  CHECK(fixture::run_cli("describe --config " + cfg + " --data " + (dir / "missing.csv").string(), log) == 3);
  CHECK(fixture::run_cli("frobnicate", log) == 2);
  CHECK(fixture::run_cli("grade --standard x.json", log) == 2);

  CHECK(snapshot(dir / "in") == inputs);
  fs::remove_all(dir);
}
