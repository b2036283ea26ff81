#pragma once

// Sweep orchestration and statistics: dyadic schedules, ordinary
// least-squares exponent fits on log-log data, and a deterministic
// parallel point runner whose aggregation is a merge keyed by schedule
// index. Aggregation inside a point is max-over-trials: every estimate
// under test is a supremum over unit-norm data.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace harmlab::experiments {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
  std::vector<std::pair<double, double>> points;  // (log N, log value)
};

// OLS on (log N, log value); drop_smallest removes that many leading
// points (smallest N) before fitting. Requires >= 3 points after the
// drop, positive N and values, and at least two distinct N.
FitResult fit_exponent(std::vector<std::pair<double, double>> points, int drop_smallest = 0);

struct Row {
  std::vector<std::pair<std::string, std::string>> fields;  // ordered columns
  void add(const std::string& key, const std::string& value) { fields.push_back({key, value}); }
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
};

std::string format_double(double v);  // round-trippable %.17g

struct PointResult {
  bool ok = true;
  std::string error;
  double value = 0.0;     // aggregated value used for the fit
  std::vector<Row> rows;  // detail rows for the CSV
};

struct SweepReport {
  std::vector<double> schedule;      // primary dyadic parameter per point
  std::vector<PointResult> points;   // same order as schedule
  std::optional<FitResult> fit;      // over successful points, when >= 3
  bool all_ok = true;
};

// Runs driver(index, N) over the schedule, optionally on a small thread
// pool; the report order is the schedule order regardless of jobs. Driver
// exceptions are captured per point and flagged, not propagated.
SweepReport run_sweep(const std::vector<double>& schedule,
                      const std::function<PointResult(std::size_t, double)>& driver, int jobs = 1,
                      int fit_drop_smallest = 0);

// CSV with the union of row columns in first-seen order; deterministic
// formatting (%.17g for doubles upstream).
std::string to_csv(const SweepReport& report);

// Minimal gnuplot script plotting value vs N from the CSV on log axes,
// with an optional reference slope line.
std::string gnuplot_script(const std::string& csv_path, const std::string& x_col,
                           const std::string& y_col, std::optional<double> reference_slope = {},
                           const std::string& title = "sweep");

}  // namespace harmlab::experiments
