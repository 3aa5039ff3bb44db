#include "lzchain/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "lzchain/errors.hpp"

namespace lzchain {

namespace {

double parse_double(std::string_view text, const std::string& field) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(field, "cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

std::optional<double> SweepRow::*derivative_member(Column column) {
  switch (column) {
    case Column::M: return &SweepRow::dm_dlambda;
    case Column::S2: return &SweepRow::ds2_dlambda;
    case Column::Gamma2: return &SweepRow::dgamma2_dlambda;
    case Column::PFlip: return &SweepRow::dp_dlambda;
  }
  return &SweepRow::dp_dlambda;
}

double SweepRow::*value_member(Column column) {
  switch (column) {
    case Column::M: return &SweepRow::m;
    case Column::S2: return &SweepRow::s2;
    case Column::Gamma2: return &SweepRow::gamma2;
    case Column::PFlip: return &SweepRow::p_flip;
  }
  return &SweepRow::p_flip;
}

// Derivative of equally spaced samples.
std::vector<double> differentiate(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / h;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(),
                                         values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

const char* to_string(AxisName name) {
  switch (name) {
    case AxisName::Lambda: return "lambda";
    case AxisName::Delta: return "delta";
    case AxisName::Gamma: return "gamma";
  }
  return "lambda";
}

AxisName parse_axis_name(std::string_view text) {
  if (text == "lambda") return AxisName::Lambda;
  if (text == "delta") return AxisName::Delta;
  if (text == "gamma") return AxisName::Gamma;
  throw ValidationError("grid", "unknown axis '" + std::string(text) +
                                    "' (expected lambda, delta or gamma)");
}

double Axis::value(int i) const {
  if (i == points - 1) return max;
  return min + static_cast<double>(i) * step();
}

void Axis::validate() const {
  const std::string field = std::string("grid.") + to_string(name);
  if (points < 2) throw ValidationError(field, "an axis needs at least 2 points");
  if (!(std::isfinite(min) && std::isfinite(max) && min < max)) {
    throw ValidationError(field, "axis requires min < max");
  }
  if (min < 0.0) throw ValidationError(field, "axis values must be >= 0");
  if (name == AxisName::Gamma && max > 1.0) {
    throw ValidationError(field, "gamma axis must lie in [0, 1]");
  }
}

Axis parse_axis(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4) {
    throw ValidationError("grid", "expected name:min:max:points, got '" + std::string(text) + "'");
  }
  Axis axis;
  axis.name = parse_axis_name(parts[0]);
  axis.min = parse_double(parts[1], "grid");
  axis.max = parse_double(parts[2], "grid");
  const double points = parse_double(parts[3], "grid");
  if (points != std::floor(points) || points > 1e7) {
    throw ValidationError("grid", "point count must be an integer");
  }
  axis.points = static_cast<int>(points);
  axis.validate();
  return axis;
}

std::string format_axis(const Axis& axis) {
  char buffer[128];
  std::snprintf(buffer, sizeof buffer, "%s:%.17g:%.17g:%d", to_string(axis.name), axis.min,
                axis.max, axis.points);
  return buffer;
}

void GridSpec::validate() const {
  axis1.validate();
  if (axis2) {
    axis2->validate();
    if (axis2->name == axis1.name) throw ValidationError("grid", "axis names must be distinct");
  }
  const auto uses = [&](AxisName name) {
    return axis1.name == name || (axis2 && axis2->name == name);
  };
  if (uses(AxisName::Gamma) && chain.kind != ChainKind::XY) {
    throw ValidationError("kind", "a gamma axis requires the XY chain");
  }
  chain.validate();
  params.validate();
}

std::optional<std::size_t> SweepTable::lambda_axis() const {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name == AxisName::Lambda) return i;
  }
  return std::nullopt;
}

SweepTable run_sweep(const GridSpec& grid) {
  grid.validate();
  SweepTable table;
  table.axes.push_back(grid.axis1);
  if (grid.axis2) table.axes.push_back(*grid.axis2);

  const int outer = grid.axis1.points;
  const int inner = grid.axis2 ? grid.axis2->points : 1;
  table.rows.reserve(static_cast<std::size_t>(outer) * static_cast<std::size_t>(inner));

  // Moments depend only on (lambda, gamma); reuse them across delta.
  std::map<std::pair<double, double>, GroundMoments> moments_cache;

  for (int i = 0; i < outer; ++i) {
    for (int j = 0; j < inner; ++j) {
      ChainSpec chain = grid.chain;
      LZParams params = grid.params;
      SweepRow row;
      row.coords[0] = grid.axis1.value(i);
      if (grid.axis2) row.coords[1] = grid.axis2->value(j);
      for (std::size_t a = 0; a < table.axes.size(); ++a) {
        switch (table.axes[a].name) {
          case AxisName::Lambda: chain.lambda = row.coords[a]; break;
          case AxisName::Delta: params.delta = row.coords[a]; break;
          case AxisName::Gamma: chain.gamma = row.coords[a]; break;
        }
      }
      const auto key = std::make_pair(chain.lambda, chain.gamma);
      auto it = moments_cache.find(key);
      if (it == moments_cache.end()) {
        it = moments_cache.emplace(key, ground_moments(chain, grid.policy)).first;
      }
      row.m = it->second.m;
      row.s2 = it->second.s2;
      const LZResult lz = lz_probability(gamma_squared(it->second, params), params);
      row.gamma2 = lz.gamma2;
      row.p_flip = lz.p_flip;
      table.rows.push_back(row);
    }
  }

  if (table.lambda_axis()) {
    for (Column column : {Column::M, Column::S2, Column::Gamma2, Column::PFlip}) {
      table = central_derivative(std::move(table), column);
    }
  }
  return table;
}

SweepTable central_derivative(SweepTable table, Column column) {
  const auto lambda_index = table.lambda_axis();
  if (!lambda_index) throw ValidationError("grid", "derivative requires a lambda axis");
  const std::size_t other_points =
      table.axes.size() == 2 ? static_cast<std::size_t>(table.axes[1 - *lambda_index].points) : 1;
  const auto lambda_points = static_cast<std::size_t>(table.axes[*lambda_index].points);
  if (table.rows.size() != lambda_points * other_points) {
    throw ValidationError("grid", "row count does not match the axes");
  }

  // Row index of (lambda node i, other node j) in row-major order.
  const auto row_of = [&](std::size_t i, std::size_t j) {
    if (table.axes.size() == 1) return i;
    return *lambda_index == 0 ? i * other_points + j : j * lambda_points + i;
  };

  const auto value = value_member(column);
  const auto target = derivative_member(column);
  for (std::size_t j = 0; j < other_points; ++j) {
    std::vector<double> f(lambda_points);
    const double h = table.rows[row_of(1, j)].coords[*lambda_index] -
                     table.rows[row_of(0, j)].coords[*lambda_index];
    for (std::size_t i = 0; i < lambda_points; ++i) {
      const SweepRow& row = table.rows[row_of(i, j)];
      f[i] = row.*value;
      if (i > 0) {
        const double gap = row.coords[*lambda_index] -
                           table.rows[row_of(i - 1, j)].coords[*lambda_index];
        if (!(h > 0.0) || std::abs(gap - h) > 1e-9 * h) {
          throw ValidationError("grid", "lambda axis is not uniform");
        }
      }
    }
    const std::vector<double> d = differentiate(f, h);
    for (std::size_t i = 0; i < lambda_points; ++i) table.rows[row_of(i, j)].*target = d[i];
  }
  return table;
}

CriticalReport locate_critical(const SweepTable& table) {
  if (table.axes.size() != 1 || table.axes[0].name != AxisName::Lambda) {
    throw ValidationError("grid", "critical-point search needs a one-dimensional lambda sweep");
  }
  if (table.rows.size() < 2) throw ValidationError("grid", "too few rows");
  std::vector<double> d;
  d.reserve(table.rows.size());
  for (const SweepRow& row : table.rows) {
    if (!row.dp_dlambda) throw ValidationError("grid", "table lacks dP/dlambda");
    d.push_back(*row.dp_dlambda);
  }

  CriticalReport report;
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (std::abs(d[i]) > std::abs(d[best])) best = i;
  }
  report.lambda_star = table.rows[best].coords[0];
  report.peak_value = std::abs(d[best]);

  std::vector<double> steps(d.size() - 1);
  for (std::size_t i = 0; i + 1 < d.size(); ++i) steps[i] = std::abs(d[i + 1] - d[i]);
  const auto largest = std::max_element(steps.begin(), steps.end());
  const double typical = median(steps);
  report.jump_detected = *largest > kJumpRatio * typical;
  if (report.jump_detected) {
    const auto at = static_cast<std::size_t>(largest - steps.begin());
    report.jump_location = 0.5 * (table.rows[at].coords[0] + table.rows[at + 1].coords[0]);
  }
  return report;
}

std::vector<std::pair<int, double>> sharpness_scaling(std::span<const int> sizes,
                                                      const GridSpec& grid) {
  std::vector<std::pair<int, double>> out;
  out.reserve(sizes.size());
  for (int n : sizes) {
    GridSpec sized = grid;
    sized.chain.n = n;
    out.emplace_back(n, locate_critical(run_sweep(sized)).peak_value);
  }
  return out;
}

std::optional<double> column_value(const SweepTable& table, const SweepRow& row,
                                   std::string_view column) {
  for (std::size_t a = 0; a < table.axes.size(); ++a) {
    if (column == to_string(table.axes[a].name)) return row.coords[a];
  }
  if (column == "m") return row.m;
  if (column == "s2") return row.s2;
  if (column == "gamma2") return row.gamma2;
  if (column == "p_flip") return row.p_flip;
  if (column == "dm_dlambda") return row.dm_dlambda;
  if (column == "ds2_dlambda") return row.ds2_dlambda;
  if (column == "dGamma2_dlambda") return row.dgamma2_dlambda;
  if (column == "dP_dlambda") return row.dp_dlambda;
  return std::nullopt;
}

std::vector<std::string> available_columns(const SweepTable& table) {
  std::vector<std::string> columns;
  for (const Axis& axis : table.axes) columns.emplace_back(to_string(axis.name));
  for (const char* name : {"m", "s2", "gamma2", "p_flip"}) columns.emplace_back(name);
  if (table.lambda_axis()) {
    for (const char* name : {"dm_dlambda", "ds2_dlambda", "dGamma2_dlambda", "dP_dlambda"}) {
      columns.emplace_back(name);
    }
  }
  return columns;
}

FigurePreset figure_preset(std::string_view name) {
  FigurePreset preset;
  preset.name = std::string(name);
  GridSpec& grid = preset.grid;
  grid.chain = ChainSpec{ChainKind::Ising, 201, 1.0, 0.0, 1.0};
  grid.params = LZParams{0.0, 50.0, 0.1, 1.0};
  grid.axis1 = Axis{AxisName::Lambda, 0.0, 2.0, 401};

  if (name == "fig1") {
    preset.columns = {"lambda", "m", "s2", "dm_dlambda", "ds2_dlambda"};
    preset.description = "ground-state moment and variance vs lambda";
  } else if (name == "fig2") {
    grid.axis2 = Axis{AxisName::Delta, 0.0, 20.0, 81};
    preset.columns = {"lambda", "delta", "gamma2", "dGamma2_dlambda"};
    preset.description = "Gamma^2 and its lambda-derivative over (lambda, delta)";
  } else if (name == "fig3") {
    grid.axis2 = Axis{AxisName::Delta, 0.0, 20.0, 81};
    preset.columns = {"lambda", "delta", "p_flip", "dP_dlambda"};
    preset.description = "flip probability and its lambda-derivative over (lambda, delta)";
  } else if (name == "fig4") {
    grid.chain.kind = ChainKind::XY;
    grid.params.delta = 5.0;
    grid.axis2 = Axis{AxisName::Gamma, 0.0, 1.0, 51};
    preset.columns = {"lambda", "gamma", "p_flip", "dP_dlambda"};
    preset.description = "XY chain: flip probability and its lambda-derivative over (lambda, gamma)";
  } else {
    throw ValidationError("preset", "unknown preset '" + std::string(name) +
                                        "' (expected fig1, fig2, fig3 or fig4)");
  }
  return preset;
}

}  // namespace lzchain
