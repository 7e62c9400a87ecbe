#include "trainlab/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace trainlab::schedule {

void ScheduleConfig::validate() const {
  if (!std::isfinite(learning_rate) || !std::isfinite(scale_constant)) {
    throw std::invalid_argument("schedule: learning_rate and scale_constant must be finite");
  }
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("schedule: learning_rate must be > 0");
  }
  if (scale_constant <= 0.0) {
    throw std::invalid_argument("schedule: scale_constant must be > 0");
  }
  if (warmup_steps < 1) {
    throw std::invalid_argument("schedule: warmup_steps must be >= 1");
  }
}

double actual_lr(const ScheduleConfig& config, std::int64_t step) {
  config.validate();
  if (step < 0) {
    throw std::invalid_argument("schedule: step must be >= 0, got " + std::to_string(step));
  }
  const double base = config.learning_rate * config.scale_constant;
  const auto s = static_cast<double>(step);
  const auto w = static_cast<double>(config.warmup_steps);
  // min(s * w^-1.5, s^-0.5): the ramp is the smaller branch exactly for s < w.
  if (step < config.warmup_steps) {
    return base * s / (w * std::sqrt(w));
  }
  return base / std::sqrt(s);
}

double peak_lr(const ScheduleConfig& config) {
  return actual_lr(config, config.warmup_steps);
}

ScheduleConfig scale_for_gpus(const ScheduleConfig& config, const GpuScalingPolicy& scaling) {
  config.validate();
  if (scaling.k < 1) {
    throw std::invalid_argument("schedule: GPU multiplier k must be >= 1");
  }
  ScheduleConfig out = config;
  const auto k = static_cast<double>(scaling.k);
  switch (scaling.rule) {
    case ScalingRule::keep_parameter:
      break;
    case ScalingRule::linear:
      out.learning_rate = config.learning_rate * k;
      break;
    case ScalingRule::sqrt:
      out.learning_rate = config.learning_rate * std::sqrt(k);
      break;
  }
  return out;
}

double equivalent_example_rate_ratio(const ScheduleConfig& config, std::int64_t k, std::int64_t step) {
  config.validate();
  if (k < 1) {
    throw std::invalid_argument("schedule: GPU multiplier k must be >= 1");
  }
  if (step > std::numeric_limits<std::int64_t>::max() / k) {
    throw std::invalid_argument("schedule: step * k overflows");
  }
  if (step < config.warmup_steps) {
    throw std::domain_error("schedule: step " + std::to_string(step) + " lies inside warmup (" +
                            std::to_string(config.warmup_steps) +
                            " steps); the sqrt(k) identity holds only in the decay region");
  }
  return actual_lr(config, step) / actual_lr(config, step * k);
}

double gradient_noise_scale(double learning_rate, double corpus_size, double effective_batch) {
  if (!std::isfinite(learning_rate) || !std::isfinite(corpus_size) || !std::isfinite(effective_batch)) {
    throw std::invalid_argument("noise scale: inputs must be finite");
  }
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("noise scale: learning_rate must be > 0");
  }
  if (effective_batch <= 0.0) {
    throw std::invalid_argument("noise scale: effective batch must be > 0");
  }
  if (effective_batch > corpus_size) {
    throw std::invalid_argument("noise scale: effective batch exceeds corpus size");
  }
  return learning_rate * (corpus_size / effective_batch - 1.0);
}

std::int64_t effective_batch_size(std::int64_t batch_size, std::int64_t gpus) {
  if (batch_size <= 0) {
    throw std::invalid_argument("batch_size must be > 0");
  }
  if (gpus < 1) {
    throw std::invalid_argument("gpus must be >= 1");
  }
  if (batch_size > std::numeric_limits<std::int64_t>::max() / gpus) {
    throw std::invalid_argument("effective batch size overflows");
  }
  return batch_size * gpus;
}

const char* to_string(ScalingRule rule) {
  switch (rule) {
    case ScalingRule::keep_parameter: return "keep";
    case ScalingRule::linear: return "linear";
    case ScalingRule::sqrt: return "sqrt";
  }
  return "?";
}

ScalingRule parse_scaling_rule(std::string_view name) {
  if (name == "keep" || name == "keep_parameter") return ScalingRule::keep_parameter;
  if (name == "linear") return ScalingRule::linear;
  if (name == "sqrt") return ScalingRule::sqrt;
  throw std::invalid_argument("unknown scaling rule '" + std::string(name) + "' (expected keep, linear or sqrt)");
}

}  // namespace trainlab::schedule
