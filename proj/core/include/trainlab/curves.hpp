#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trainlab::curves {

struct CurvePoint {
  std::int64_t step = 0;
  double wall_time = 0.0;  ///< seconds since training start
  double value = 0.0;
};

/// A metric time series of one run. Immutable once constructed; the
/// constructor enforces step >= 0, wall_time >= 0, strictly increasing
/// wall_time and non-decreasing steps.
class Curve {
 public:
  Curve(std::string metric_name, std::string source_run, std::vector<CurvePoint> points);

  const std::string& metric_name() const { return metric_name_; }
  const std::string& source_run() const { return source_run_; }
  const std::vector<CurvePoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

 private:
  std::string metric_name_;
  std::string source_run_;
  std::vector<CurvePoint> points_;
};

/// Parses the JSON-lines event log: one object per line with keys
/// run, metric, step, wall_time (seconds) and value. Blank lines are skipped.
/// Returns one Curve per (run, metric), in order of first appearance.
/// Throws FormatError naming the line for malformed records, negative values
/// or a wall_time that does not increase within a curve.
std::vector<Curve> ingest_events(std::istream& in, const std::string& source_name = "<stream>");
std::vector<Curve> ingest_events(const std::filesystem::path& path);

struct TtsOptions {
  /// Trailing moving-average window in points applied before the scan;
  /// 1 disables smoothing.
  std::size_t smoothing_points = 1;
};

struct ScoreTime {
  double wall_time = 0.0;
  std::int64_t step = 0;
};

/// Time Till Score: wall time of the earliest point after which the value
/// never falls below `threshold`. std::nullopt when the curve ends below it.
std::optional<ScoreTime> time_till_score(const Curve& curve, double threshold, const TtsOptions& options = {});

/// Examples Till Score: hours * subwords/hour.
double examples_till_score(double tts_hours, double throughput_per_hour);
std::optional<double> examples_till_score(std::optional<double> tts_hours, double throughput_per_hour);

struct SlopePoint {
  double wall_time = 0.0;
  double per_hour = 0.0;  ///< value units per hour
};

/// Centered finite-difference slope with a window of `window_seconds`. For
/// every point t with [t - w/2, t + w/2] inside the curve's time span, the
/// slope is (v(t + w/2) - v(t - w/2)) / w with v linearly interpolated.
/// Throws std::invalid_argument if window <= 0 or the curve spans less.
std::vector<SlopePoint> convergence_speed(const Curve& curve, double window_seconds);

enum class XAxis { hours, steps, examples };

XAxis parse_x_axis(const std::string& name);
const char* to_string(XAxis axis);

/// (x, value) rows; the examples axis is step * effective_batch and requires it.
std::vector<std::pair<double, double>> plot_series(const Curve& curve, XAxis axis,
                                                   std::optional<double> effective_batch = std::nullopt);

/// Two-column TSV: a "# <axis>\t<metric>" comment header, then one row per point.
std::string emit_plot_data(const Curve& curve, XAxis axis, std::optional<double> effective_batch = std::nullopt);

}  // namespace trainlab::curves
