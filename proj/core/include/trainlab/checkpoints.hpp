#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace trainlab::checkpoints {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

const char* to_string(DType dtype);

/// Row-major tensor; the storage vector's element type determines the dtype.
struct Tensor {
  std::vector<std::uint64_t> shape;
  std::variant<std::vector<float>, std::vector<double>> data;

  DType dtype() const { return data.index() == 0 ? DType::f32 : DType::f64; }
  std::size_t size() const;
  std::uint64_t element_count() const;  ///< product of shape

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

struct Checkpoint {
  std::uint64_t step = 0;
  std::map<std::string, Tensor> tensors;

  /// Throws FormatError if there are no tensors or a tensor's data length
  /// differs from the product of its shape.
  void validate() const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Container layout, little-endian:
///   "TLCK" u32 version(=1) u64 step u32 tensor_count
///   per tensor: u32 name_len, name bytes (UTF-8), u8 dtype, u32 rank,
///               u64 dims[rank], raw row-major data
inline constexpr char kMagic[4] = {'T', 'L', 'C', 'K'};
inline constexpr std::uint32_t kFormatVersion = 1;

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Writes to a hidden temporary next to `path` and renames it into place.
void write_checkpoint_atomic(const Checkpoint& ckpt, const std::filesystem::path& path);

Checkpoint read_checkpoint(std::istream& in, const std::string& source_name = "<stream>");
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Reads only magic, version and step.
std::uint64_t read_checkpoint_step(const std::filesystem::path& path);

/// Streaming elementwise mean with double-precision accumulators. The first
/// checkpoint fixes the schema (names, shapes, dtypes).
class Averager {
 public:
  void add(const Checkpoint& ckpt);
  std::size_t count() const { return count_; }
  /// Mean in each tensor's storage dtype; step = max step seen.
  Checkpoint result() const;

 private:
  struct Slot {
    std::vector<std::uint64_t> shape;
    DType dtype = DType::f32;
    std::vector<double> sum;
  };
  std::map<std::string, Slot> slots_;
  std::uint64_t max_step_ = 0;
  std::size_t count_ = 0;
};

/// Throws std::invalid_argument on an empty list and FormatError on schema
/// mismatch (the message names the tensor).
Checkpoint average_checkpoints(std::span<const Checkpoint> ckpts);

struct AveragingWindow {
  std::size_t window_size = 8;
  double min_interval = 3600.0;  ///< seconds between selected checkpoints
};

struct CheckpointEntry {
  std::filesystem::path path;
  std::uint64_t step = 0;
  double mtime = 0.0;  ///< seconds, any fixed epoch
};

/// Newest-first thinning: keep the newest entry, then repeatedly the newest
/// entry saved at least min_interval before the last kept one, until
/// window_size entries are kept. Result is ordered oldest to newest.
std::vector<std::filesystem::path> select_window(std::span<const CheckpointEntry> listing,
                                                 const AveragingWindow& window);

/// Time source for the watcher; tests substitute a scripted clock.
class Clock {
 public:
  using duration = std::chrono::duration<double>;
  virtual ~Clock() = default;
  virtual double now() = 0;  ///< seconds
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  double now() override;
  void sleep_for(duration d) override;
};

struct WatchOptions {
  AveragingWindow window;
  double poll_interval = 60.0;  ///< seconds
  double patience = 7200.0;     ///< stop after this long without a new checkpoint
  /// Where averages go; defaults to <dir>/averaged.
  std::filesystem::path output_dir;
};

struct Emission {
  std::filesystem::path output;
  std::uint64_t step = 0;
  std::vector<std::filesystem::path> members;  ///< oldest to newest
};

using EmitCallback = std::function<void(const Emission&)>;
using WarnCallback = std::function<void(const std::string&)>;

/// Polls `dir` for *.tlck files. Each new readable checkpoint that becomes the
/// newest member of the selected window triggers an average written to
/// <output_dir>/avg-<step>.tlck via an atomic rename. Unreadable files are
/// reported once through `warn` and skipped. Returns after `patience` seconds
/// pass without a new checkpoint.
std::vector<Emission> watch_and_average(const std::filesystem::path& dir, const WatchOptions& options, Clock& clock,
                                        const EmitCallback& on_emit = {}, const WarnCallback& warn = {});

}  // namespace trainlab::checkpoints
