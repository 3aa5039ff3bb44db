#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lzchain/chain_spectrum.hpp"
#include "lzchain/lz_core.hpp"

namespace lzchain {

enum class AxisName { Lambda, Delta, Gamma };

const char* to_string(AxisName name);
/// Parses "lambda", "delta" or "gamma"; throws ValidationError otherwise.
AxisName parse_axis_name(std::string_view text);

/// Uniform grid min, min + h, ..., max with `points` nodes.
struct Axis {
  AxisName name = AxisName::Lambda;
  double min = 0.0;
  double max = 1.0;
  int points = 2;

  double step() const { return (max - min) / static_cast<double>(points - 1); }
  double value(int i) const;
  void validate() const;
};

/// Parses "name:min:max:points".
Axis parse_axis(std::string_view text);
std::string format_axis(const Axis& axis);

struct GridSpec {
  Axis axis1;
  std::optional<Axis> axis2;
  /// Values for every parameter not swept.
  ChainSpec chain;
  LZParams params;
  GaplessPolicy policy = GaplessPolicy::Limit;

  void validate() const;
};

enum class Column { M, S2, Gamma2, PFlip };

struct SweepRow {
  std::array<double, 2> coords{};
  double m = 0.0;
  double s2 = 0.0;
  double gamma2 = 0.0;
  double p_flip = 0.0;
  std::optional<double> dm_dlambda;
  std::optional<double> ds2_dlambda;
  std::optional<double> dgamma2_dlambda;
  std::optional<double> dp_dlambda;
};

/// Rows are row-major over the axes: axis 1 outer, axis 2 inner.
struct SweepTable {
  std::vector<Axis> axes;
  std::vector<SweepRow> rows;

  std::optional<std::size_t> lambda_axis() const;
};

struct CriticalReport {
  double lambda_star = 0.0;
  double peak_value = 0.0;
  bool jump_detected = false;
  std::optional<double> jump_location;
};

/// A jump is flagged when the largest adjacent change of dP/dlambda exceeds
/// this multiple of the median adjacent change.
inline constexpr double kJumpRatio = 10.0;

/// Evaluates every grid point. When a lambda axis is present all four
/// lambda-derivative columns are filled.
SweepTable run_sweep(const GridSpec& grid);

/// Fills the d/dlambda column for `column`: central differences inside,
/// second-order one-sided differences at the ends (plain difference when the
/// axis has only two points). Rejects tables without a uniform lambda axis.
SweepTable central_derivative(SweepTable table, Column column);

/// Expects a one-dimensional lambda table with dP/dlambda.
CriticalReport locate_critical(const SweepTable& table);

/// Peak |dP/dlambda| of a one-dimensional lambda sweep for each chain length.
std::vector<std::pair<int, double>> sharpness_scaling(std::span<const int> sizes,
                                                      const GridSpec& grid);

/// Named column lookup: axis names, m, s2, gamma2, p_flip, dm_dlambda,
/// ds2_dlambda, dGamma2_dlambda, dP_dlambda. Empty when the row lacks it.
std::optional<double> column_value(const SweepTable& table, const SweepRow& row,
                                   std::string_view column);

/// Column names present in `table`, axes first.
std::vector<std::string> available_columns(const SweepTable& table);

/// Named parameter sets for the four figure surfaces. N = 201 replaces an
/// even N = 200, which the odd-N mode counting does not cover.
struct FigurePreset {
  std::string name;
  GridSpec grid;
  std::vector<std::string> columns;
  std::string description;
};

FigurePreset figure_preset(std::string_view name);

}  // namespace lzchain
