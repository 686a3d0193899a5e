#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sqcsef {

enum class Direction { maximize, minimize };

std::string to_string(Direction d);
Direction parse_direction(const std::string& s);

struct IndicatorSpec {
  std::string name;
  std::string unit;
  Direction direction = Direction::maximize;
  bool integer_valued = false;
  int decimals = -1;  ///< display precision; -1 derives it from the column range

  bool operator==(const IndicatorSpec&) const = default;
};

/// M samples by N indicators in original units. Construction validates the
/// table: M >= 2, N >= 1, unique names, finite cells, whole numbers in
/// integer-valued columns.
class RawDataset {
 public:
  RawDataset(std::vector<IndicatorSpec> indicators, Eigen::MatrixXd rows, std::string source = {});

  [[nodiscard]] const std::vector<IndicatorSpec>& indicators() const { return indicators_; }
  [[nodiscard]] const Eigen::MatrixXd& rows() const { return rows_; }
  [[nodiscard]] const std::string& source() const { return source_; }
  [[nodiscard]] Eigen::Index samples() const { return rows_.rows(); }
  [[nodiscard]] Eigen::Index size() const { return rows_.cols(); }
  [[nodiscard]] std::span<const double> column(Eigen::Index j) const {
    return {rows_.col(j).data(), static_cast<std::size_t>(rows_.rows())};
  }

 private:
  std::vector<IndicatorSpec> indicators_;
  Eigen::MatrixXd rows_;
  std::string source_;
};

/// Affine parameters of one column. `lo`/`hi` bound the forwardized column;
/// `forward_max` is the original column maximum used by x' = max(x) - x for
/// minimize indicators (ignored for maximize indicators).
struct ScaleParams {
  double lo = 0.0;
  double hi = 1.0;
  double forward_max = 0.0;
};

/// Scale parameters for a column whose original values span [min, max].
ScaleParams scale_params_from_range(const IndicatorSpec& spec, double min, double max);

struct StandardizedDataset {
  Eigen::MatrixXd matrix;  ///< every cell in [0, 1]
  std::vector<ScaleParams> scale;
  std::vector<IndicatorSpec> indicators;
};

struct IndicatorSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation, divisor M - 1
};

struct DescriptiveStats {
  std::vector<std::string> names;
  std::vector<IndicatorSummary> columns;
};

// -- ingestion ---------------------------------------------------------------

/// Reads the indicator sidecar config: one `[indicator."<name>"]` table per
/// indicator with `direction`, `unit` and `integer` keys, in column order.
std::vector<IndicatorSpec> load_indicator_config(const std::filesystem::path& path);
std::vector<IndicatorSpec> parse_indicator_config(const std::string& text, const std::string& source = "<string>");
std::string format_indicator_config(std::span<const IndicatorSpec> specs);

/// Parses a CSV whose header names match `specs` (any order). Columns are
/// returned in spec order, rows in file order.
RawDataset parse_csv(const std::string& text, const std::vector<IndicatorSpec>& specs,
                     const std::string& source = "<string>");
RawDataset load_csv(const std::filesystem::path& path, const std::vector<IndicatorSpec>& specs);
std::string format_csv(const RawDataset& d);

// -- transforms --------------------------------------------------------------

IndicatorSummary summarize(std::span<const double> column);
DescriptiveStats describe(const RawDataset& d);

/// Minimize columns become max(x) - x; maximize columns pass through.
RawDataset forwardize(const RawDataset& d);

/// Forwardizes, then min-max scales every column to [0, 1]. Throws DataError
/// naming the indicator when a column is constant.
StandardizedDataset normalize(const RawDataset& d);

/// Maps a standardized value back to original units, composing the inverse of
/// the min-max scaling with the inverse of the forward transform.
double denormalize_value(double v, const IndicatorSpec& spec, const ScaleParams& params);

/// Original units to standardized scale (not clamped).
double normalize_value(double x, const IndicatorSpec& spec, const ScaleParams& params);

}  // namespace sqcsef
