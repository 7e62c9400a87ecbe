#pragma once

#include <cstdint>
#include <string_view>

namespace trainlab::schedule {

enum class ScheduleKind {
  linear_warmup_rsqrt_decay,
};

/// Parameters of the learning-rate schedule.
///
/// The rate applied at a step is
///   learning_rate * scale_constant * min(step * warmup^-1.5, step^-0.5),
/// i.e. a linear ramp up to `warmup_steps` followed by inverse square root
/// decay. `scale_constant` absorbs any framework-specific normalization
/// (hidden-size factors and the like); it defaults to 1.
struct ScheduleConfig {
  double learning_rate = 0.20;
  std::int64_t warmup_steps = 16000;
  double scale_constant = 1.0;
  ScheduleKind kind = ScheduleKind::linear_warmup_rsqrt_decay;

  /// Throws std::invalid_argument unless learning_rate > 0, warmup_steps >= 1,
  /// scale_constant > 0 and all values are finite.
  void validate() const;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

enum class ScalingRule {
  keep_parameter,  ///< leave learning_rate alone
  linear,          ///< learning_rate * k
  sqrt,            ///< learning_rate * sqrt(k)
};

struct GpuScalingPolicy {
  ScalingRule rule = ScalingRule::keep_parameter;
  std::int64_t k = 1;
};

/// Learning rate after applying the schedule at `step`. Step 0 yields 0.
double actual_lr(const ScheduleConfig& config, std::int64_t step);

/// The highest actual rate, reached exactly at step == warmup_steps.
double peak_lr(const ScheduleConfig& config);

/// Adjusts learning_rate for a k-times larger effective batch. warmup_steps is
/// never touched. With keep_parameter the actual rate per training example
/// grows by sqrt(k) implicitly, because the schedule is driven by steps.
ScheduleConfig scale_for_gpus(const ScheduleConfig& config, const GpuScalingPolicy& scaling);

/// actual_lr(step) / actual_lr(step * k). Both points must lie in the decay
/// region, where the result is sqrt(k); throws std::domain_error otherwise.
double equivalent_example_rate_ratio(const ScheduleConfig& config, std::int64_t k, std::int64_t step);

/// Gradient noise scale lr * (N / B - 1) for corpus size N and effective batch
/// B, both in subwords. Requires 0 < B <= N.
double gradient_noise_scale(double learning_rate, double corpus_size, double effective_batch);

/// Subwords digested per step: batch_size is interpreted per GPU.
std::int64_t effective_batch_size(std::int64_t batch_size, std::int64_t gpus);

const char* to_string(ScalingRule rule);
ScalingRule parse_scaling_rule(std::string_view name);

}  // namespace trainlab::schedule
