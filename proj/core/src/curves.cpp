#include "trainlab/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "trainlab/errors.hpp"
#include "trainlab/numeric_format.hpp"

namespace trainlab::curves {

namespace {

std::string describe(const CurvePoint& p) {
  return "step " + std::to_string(p.step) + ", wall_time " + format_number(p.wall_time);
}

void check_point(const CurvePoint& p) {
  if (p.step < 0) {
    throw std::invalid_argument("curve point has negative step (" + describe(p) + ")");
  }
  if (!std::isfinite(p.wall_time) || p.wall_time < 0.0) {
    throw std::invalid_argument("curve point has negative or non-finite wall_time (" + describe(p) + ")");
  }
  if (!std::isfinite(p.value)) {
    throw std::invalid_argument("curve point has non-finite value (" + describe(p) + ")");
  }
}

}  // namespace

Curve::Curve(std::string metric_name, std::string source_run, std::vector<CurvePoint> points)
    : metric_name_(std::move(metric_name)), source_run_(std::move(source_run)), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    check_point(points_[i]);
    if (i > 0) {
      if (points_[i].wall_time <= points_[i - 1].wall_time) {
        throw std::invalid_argument("curve '" + metric_name_ + "': wall_time not strictly increasing at " +
                                    describe(points_[i]));
      }
      if (points_[i].step < points_[i - 1].step) {
        throw std::invalid_argument("curve '" + metric_name_ + "': step decreases at " + describe(points_[i]));
      }
    }
  }
}

std::vector<Curve> ingest_events(std::istream& in, const std::string& source_name) {
  struct Pending {
    std::string run;
    std::string metric;
    std::vector<CurvePoint> points;
  };
  std::vector<Pending> pending;
  std::map<std::pair<std::string, std::string>, std::size_t> index;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto where = source_name + ":" + std::to_string(line_no) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + "malformed JSON (" + e.what() + ")");
    }
    CurvePoint p;
    std::string run;
    std::string metric;
    try {
      run = rec.at("run").get<std::string>();
      metric = rec.at("metric").get<std::string>();
      const auto& step = rec.at("step");
      if (!step.is_number_integer()) {
        throw FormatError(where + "step must be an integer");
      }
      p.step = step.get<std::int64_t>();
      p.wall_time = rec.at("wall_time").get<double>();
      p.value = rec.at("value").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + "bad event record (" + e.what() + ")");
    }
    if (p.step < 0) {
      throw FormatError(where + "negative step");
    }
    if (!std::isfinite(p.wall_time) || p.wall_time < 0.0) {
      throw FormatError(where + "negative wall_time");
    }
    if (!std::isfinite(p.value)) {
      throw FormatError(where + "non-finite value");
    }
    auto [it, inserted] = index.try_emplace({run, metric}, pending.size());
    if (inserted) {
      pending.push_back({run, metric, {}});
    }
    auto& points = pending[it->second].points;
    if (!points.empty()) {
      if (p.wall_time <= points.back().wall_time) {
        throw FormatError(where + "wall_time " + format_number(p.wall_time) + " does not increase for run '" + run +
                          "' metric '" + metric + "'");
      }
      if (p.step < points.back().step) {
        throw FormatError(where + "step decreases for run '" + run + "' metric '" + metric + "'");
      }
    }
    points.push_back(p);
  }
  if (in.bad()) {
    throw IoError("error reading " + source_name);
  }
  std::vector<Curve> curves;
  curves.reserve(pending.size());
  for (auto& pc : pending) {
    curves.emplace_back(std::move(pc.metric), std::move(pc.run), std::move(pc.points));
  }
  return curves;
}

std::vector<Curve> ingest_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open event log '" + path.string() + "'");
  }
  return ingest_events(in, path.string());
}

std::optional<ScoreTime> time_till_score(const Curve& curve, double threshold, const TtsOptions& options) {
  if (curve.empty()) {
    throw std::invalid_argument("time_till_score: empty curve");
  }
  if (options.smoothing_points == 0) {
    throw std::invalid_argument("time_till_score: smoothing window must be >= 1 point");
  }
  const auto& pts = curve.points();
  std::vector<double> values(pts.size());
  if (options.smoothing_points == 1) {
    std::transform(pts.begin(), pts.end(), values.begin(), [](const CurvePoint& p) { return p.value; });
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sum += pts[i].value;
      if (i >= options.smoothing_points) {
        sum -= pts[i - options.smoothing_points].value;
      }
      values[i] = sum / static_cast<double>(std::min(i + 1, options.smoothing_points));
    }
  }
  // Walk back from the end while the suffix stays at or above the threshold.
  std::size_t first = values.size();
  while (first > 0 && values[first - 1] >= threshold) {
    --first;
  }
  if (first == values.size()) {
    return std::nullopt;
  }
  return ScoreTime{pts[first].wall_time, pts[first].step};
}

double examples_till_score(double tts_hours, double throughput_per_hour) {
  if (tts_hours < 0.0 || throughput_per_hour < 0.0) {
    throw std::invalid_argument("examples_till_score: inputs must be non-negative");
  }
  return tts_hours * throughput_per_hour;
}

std::optional<double> examples_till_score(std::optional<double> tts_hours, double throughput_per_hour) {
  if (!tts_hours) {
    return std::nullopt;
  }
  return examples_till_score(*tts_hours, throughput_per_hour);
}

namespace {

// Linear interpolation of the value at time t, t within the curve's span.
double value_at(const std::vector<CurvePoint>& pts, double t) {
  const auto it = std::lower_bound(pts.begin(), pts.end(), t,
                                   [](const CurvePoint& p, double time) { return p.wall_time < time; });
  if (it == pts.end()) {
    return pts.back().value;
  }
  if (it->wall_time == t || it == pts.begin()) {
    return it->value;
  }
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double frac = (t - lo.wall_time) / (hi.wall_time - lo.wall_time);
  return lo.value + frac * (hi.value - lo.value);
}

}  // namespace

std::vector<SlopePoint> convergence_speed(const Curve& curve, double window_seconds) {
  if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) {
    throw std::invalid_argument("convergence_speed: window must be > 0");
  }
  const auto& pts = curve.points();
  if (pts.size() < 2 || pts.back().wall_time - pts.front().wall_time < window_seconds) {
    throw std::invalid_argument("convergence_speed: curve spans less than the window of " +
                                format_number(window_seconds) + " s");
  }
  const double half = window_seconds / 2.0;
  const double hours = window_seconds / 3600.0;
  std::vector<SlopePoint> out;
  for (const auto& p : pts) {
    const double lo = p.wall_time - half;
    const double hi = p.wall_time + half;
    if (lo < pts.front().wall_time || hi > pts.back().wall_time) {
      continue;
    }
    out.push_back({p.wall_time, (value_at(pts, hi) - value_at(pts, lo)) / hours});
  }
  return out;
}

XAxis parse_x_axis(const std::string& name) {
  if (name == "hours") return XAxis::hours;
  if (name == "steps") return XAxis::steps;
  if (name == "examples") return XAxis::examples;
  throw std::invalid_argument("unknown x axis '" + name + "' (expected hours, steps or examples)");
}

const char* to_string(XAxis axis) {
  switch (axis) {
    case XAxis::hours: return "hours";
    case XAxis::steps: return "steps";
    case XAxis::examples: return "examples";
  }
  return "?";
}

std::vector<std::pair<double, double>> plot_series(const Curve& curve, XAxis axis,
                                                   std::optional<double> effective_batch) {
  if (axis == XAxis::examples) {
    if (!effective_batch) {
      throw std::invalid_argument("the examples axis needs the effective batch size");
    }
    if (!(*effective_batch > 0.0)) {
      throw std::invalid_argument("effective batch must be > 0");
    }
  }
  std::vector<std::pair<double, double>> rows;
  rows.reserve(curve.size());
  for (const auto& p : curve.points()) {
    double x = 0.0;
    switch (axis) {
      case XAxis::hours: x = p.wall_time / 3600.0; break;
      case XAxis::steps: x = static_cast<double>(p.step); break;
      case XAxis::examples: x = static_cast<double>(p.step) * *effective_batch; break;
    }
    rows.emplace_back(x, p.value);
  }
  return rows;
}

std::string emit_plot_data(const Curve& curve, XAxis axis, std::optional<double> effective_batch) {
  const auto rows = plot_series(curve, axis, effective_batch);
  std::string out = "# ";
  out += to_string(axis);
  out += '\t';
  out += curve.metric_name();
  out += '\n';
  for (const auto& [x, v] : rows) {
    out += format_number(x);
    out += '\t';
    out += format_number(v);
    out += '\n';
  }
  return out;
}

}  // namespace trainlab::curves
