#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "sqcsef/report.hpp"
#include "sqcsef/synth.hpp"

namespace fixture {

namespace fs = std::filesystem;

/// Fresh scratch directory under the system temp dir.
inline fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sqcsef_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Writes seedlings.csv, indicators.toml and pipeline.toml for a synthetic
/// preset dataset into `dir`.
inline void write_synthetic(const fs::path& dir, std::uint64_t seed, const std::string& method = "kmeans",
                            int samples = 200) {
  const auto raw = sqcsef::synth::generate(sqcsef::synth::Spec::seedling_preset(seed, samples));
  sqcsef::report::write_text(dir / "seedlings.csv", sqcsef::format_csv(raw));
  sqcsef::report::write_text(dir / "indicators.toml", sqcsef::format_indicator_config(raw.indicators()));
  sqcsef::report::write_text(dir / "pipeline.toml", "data = \"seedlings.csv\"\nindicators = \"indicators.toml\"\n"
                                                    "method = \"" + method + "\"\nk = 3\nseed = " +
                                                    std::to_string(seed) + "\n");
}

inline int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SQCSEF_CLI) + " " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace fixture
