#include "harmlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

namespace harmlab::experiments {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Row::add(const std::string& key, double value) {
  fields.push_back({key, format_double(value)});
}
void Row::add(const std::string& key, long long value) {
  fields.push_back({key, std::to_string(value)});
}

FitResult fit_exponent(std::vector<std::pair<double, double>> points, int drop_smallest) {
  std::sort(points.begin(), points.end());
  if (drop_smallest < 0 || drop_smallest >= static_cast<int>(points.size()))
    throw std::invalid_argument("fit_exponent: bad drop_smallest");
  points.erase(points.begin(), points.begin() + drop_smallest);
  if (points.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");

  FitResult fit;
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [N, v] : points) {
    if (!(N > 0) || !(v > 0))
      throw std::invalid_argument("fit_exponent: N and values must be positive");
    long double x = std::log(static_cast<long double>(N));
    long double y = std::log(static_cast<long double>(v));
    fit.points.push_back({static_cast<double>(x), static_cast<double>(y)});
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const long double n = points.size();
  long double det = n * sxx - sx * sx;
  if (!(std::abs(static_cast<double>(det)) > 1e-14))
    throw std::invalid_argument("fit_exponent: degenerate schedule (all N equal)");
  fit.slope = static_cast<double>((n * sxy - sx * sy) / det);
  fit.intercept = static_cast<double>((sy - fit.slope * sx) / n);
  for (auto& [x, y] : fit.points)
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(y - fit.slope * x - fit.intercept));
  return fit;
}

SweepReport run_sweep(const std::vector<double>& schedule,
                      const std::function<PointResult(std::size_t, double)>& driver, int jobs,
                      int fit_drop_smallest) {
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1]))
      throw std::invalid_argument("run_sweep: schedule must be strictly increasing");

  SweepReport report;
  report.schedule = schedule;
  report.points.resize(schedule.size());

  auto run_one = [&](std::size_t i) {
    PointResult r;
    try {
      r = driver(i, schedule[i]);
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    return r;
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < schedule.size(); ++i) report.points[i] = run_one(i);
  } else {
    std::vector<std::future<PointResult>> futs(schedule.size());
    std::size_t next = 0;
    while (next < schedule.size()) {
      std::size_t batch = std::min<std::size_t>(jobs, schedule.size() - next);
      for (std::size_t j = 0; j < batch; ++j)
        futs[next + j] = std::async(std::launch::async, run_one, next + j);
      for (std::size_t j = 0; j < batch; ++j) report.points[next + j] = futs[next + j].get();
      next += batch;
    }
  }

  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (report.points[i].ok) {
      if (report.points[i].value > 0) fit_points.push_back({schedule[i], report.points[i].value});
    } else {
      report.all_ok = false;
    }
  }
  if (fit_points.size() >= static_cast<std::size_t>(3 + fit_drop_smallest))
    report.fit = fit_exponent(fit_points, fit_drop_smallest);
  return report;
}

std::string to_csv(const SweepReport& report) {
  // union of columns in first-seen order
  std::vector<std::string> columns;
  auto ensure = [&](const std::string& c) {
    if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
  };
  for (const auto& p : report.points)
    for (const auto& row : p.rows)
      for (const auto& [k, v] : row.fields) ensure(k);

  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << "\n";
  for (const auto& p : report.points) {
    for (const auto& row : p.rows) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) os << ",";
        for (const auto& [k, v] : row.fields)
          if (k == columns[c]) {
            os << v;
            break;
          }
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string gnuplot_script(const std::string& csv_path, const std::string& x_col,
                           const std::string& y_col, std::optional<double> reference_slope,
                           const std::string& title) {
  std::ostringstream os;
  os << "set datafile separator ','\n";
  os << "set logscale xy\n";
  os << "set key left top\n";
  os << "set title '" << title << "'\n";
  os << "set xlabel '" << x_col << "'\nset ylabel '" << y_col << "'\n";
  os << "plot '" << csv_path << "' using '" << x_col << "':'" << y_col << "' with points title '"
     << y_col << "'";
  if (reference_slope)
    os << ", \\\n     x**" << format_double(*reference_slope) << " with lines title 'slope "
       << format_double(*reference_slope) << "'";
  os << "\n";
  return os.str();
}

}  // namespace harmlab::experiments
