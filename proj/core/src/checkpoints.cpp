#include "trainlab/checkpoints.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <system_error>
#include <thread>

#include "trainlab/errors.hpp"

namespace trainlab::checkpoints {

const char* to_string(DType dtype) { return dtype == DType::f32 ? "f32" : "f64"; }

std::size_t Tensor::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::uint64_t Tensor::element_count() const {
  std::uint64_t n = 1;
  for (const auto d : shape) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
      throw FormatError("tensor shape overflows");
    }
    n *= d;
  }
  return n;
}

void Checkpoint::validate() const {
  if (tensors.empty()) {
    throw FormatError("checkpoint has no tensors");
  }
  for (const auto& [name, t] : tensors) {
    if (t.element_count() != t.size()) {
      throw FormatError("tensor '" + name + "': data length " + std::to_string(t.size()) +
                        " does not match shape product " + std::to_string(t.element_count()));
    }
  }
}

namespace {

static_assert(std::numeric_limits<float>::is_iec559 && std::numeric_limits<double>::is_iec559);

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(buf), std::end(buf));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
void put_array_le(std::ostream& out, const std::vector<T>& values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(T)));
  } else {
    for (const auto v : values) {
      put_le(out, v);
    }
  }
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  template <typename T>
  T get(const std::string& what) {
    unsigned char buf[sizeof(T)];
    read_exact(buf, sizeof(T), what);
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(std::begin(buf), std::end(buf));
    }
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }

  template <typename T>
  std::vector<T> get_array(std::uint64_t count, const std::string& what) {
    // Refuse counts that cannot fit in memory before allocating.
    if (count > std::numeric_limits<std::size_t>::max() / sizeof(T) / 2) {
      throw FormatError(source_ + ": " + what + " is implausibly large");
    }
    std::vector<T> values;
    constexpr std::uint64_t chunk = std::uint64_t{1} << 20;
    for (std::uint64_t done = 0; done < count;) {
      const auto n = std::min(chunk, count - done);
      const auto old = values.size();
      values.resize(old + static_cast<std::size_t>(n));
      read_exact(values.data() + old, static_cast<std::size_t>(n) * sizeof(T), what);
      done += n;
    }
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& v : values) {
        unsigned char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        std::reverse(std::begin(buf), std::end(buf));
        std::memcpy(&v, buf, sizeof(T));
      }
    }
    return values;
  }

  std::string get_string(std::uint32_t len, const std::string& what) {
    std::string s(len, '\0');
    read_exact(s.data(), len, what);
    return s;
  }

  const std::string& source() const { return source_; }

 private:
  void read_exact(void* dst, std::size_t n, const std::string& what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(source_ + ": truncated while reading " + what);
    }
  }

  std::istream& in_;
  std::string source_;
};

void read_header(Reader& r) {
  char magic[4];
  for (char& c : magic) {
    c = static_cast<char>(r.get<std::uint8_t>("magic"));
  }
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(r.source() + ": bad magic (not a TLCK checkpoint)");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kFormatVersion) {
    throw FormatError(r.source() + ": unsupported container version " + std::to_string(version));
  }
}

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  ckpt.validate();
  if (ckpt.tensors.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError("too many tensors");
  }
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, ckpt.step);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.dtype()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (const auto d : t.shape) {
      put_le<std::uint64_t>(out, d);
    }
    std::visit([&](const auto& v) { put_array_le(out, v); }, t.data);
  }
  if (!out) {
    throw IoError("failed to write checkpoint");
  }
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  write_checkpoint(ckpt, out);
  out.close();
  if (!out) {
    throw IoError("failed to write '" + path.string() + "'");
  }
}

void write_checkpoint_atomic(const Checkpoint& ckpt, const std::filesystem::path& path) {
  auto tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  write_checkpoint(ckpt, tmp);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source_name) {
  Reader r(in, source_name);
  read_header(r);
  Checkpoint ckpt;
  ckpt.step = r.get<std::uint64_t>("step");
  const auto count = r.get<std::uint32_t>("tensor count");
  if (count == 0) {
    throw FormatError(source_name + ": checkpoint has no tensors");
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto label = "tensor #" + std::to_string(i);
    const auto name_len = r.get<std::uint32_t>(label + " name length");
    auto name = r.get_string(name_len, label + " name");
    const auto what = "tensor '" + name + "'";
    const auto dtype = r.get<std::uint8_t>(what + " dtype");
    if (dtype > 1) {
      throw FormatError(source_name + ": " + what + " has unknown dtype " + std::to_string(dtype));
    }
    const auto rank = r.get<std::uint32_t>(what + " rank");
    Tensor t;
    t.shape = r.get_array<std::uint64_t>(rank, what + " dims");
    std::uint64_t n = 0;
    try {
      n = t.element_count();
    } catch (const FormatError&) {
      throw FormatError(source_name + ": " + what + " shape overflows");
    }
    if (dtype == static_cast<std::uint8_t>(DType::f32)) {
      t.data = r.get_array<float>(n, what + " data");
    } else {
      t.data = r.get_array<double>(n, what + " data");
    }
    if (!ckpt.tensors.emplace(std::move(name), std::move(t)).second) {
      throw FormatError(source_name + ": duplicate " + what);
    }
  }
  return ckpt;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint '" + path.string() + "'");
  }
  return read_checkpoint(in, path.string());
}

std::uint64_t read_checkpoint_step(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint '" + path.string() + "'");
  }
  Reader r(in, path.string());
  read_header(r);
  return r.get<std::uint64_t>("step");
}

void Averager::add(const Checkpoint& ckpt) {
  ckpt.validate();
  if (count_ == 0) {
    for (const auto& [name, t] : ckpt.tensors) {
      Slot slot{t.shape, t.dtype(), std::vector<double>(t.size(), 0.0)};
      slots_.emplace(name, std::move(slot));
    }
  } else {
    if (ckpt.tensors.size() != slots_.size()) {
      throw FormatError("checkpoint at step " + std::to_string(ckpt.step) + " has " +
                        std::to_string(ckpt.tensors.size()) + " tensors, expected " + std::to_string(slots_.size()));
    }
    for (const auto& [name, t] : ckpt.tensors) {
      const auto it = slots_.find(name);
      if (it == slots_.end()) {
        throw FormatError("tensor '" + name + "' is not present in the first checkpoint");
      }
      if (it->second.shape != t.shape) {
        throw FormatError("tensor '" + name + "': shape mismatch");
      }
      if (it->second.dtype != t.dtype()) {
        throw FormatError("tensor '" + name + "': dtype mismatch (" + to_string(t.dtype()) + " vs " +
                          to_string(it->second.dtype) + ")");
      }
    }
  }
  for (const auto& [name, t] : ckpt.tensors) {
    auto& sum = slots_.at(name).sum;
    std::visit(
        [&](const auto& v) {
          for (std::size_t i = 0; i < v.size(); ++i) {
            sum[i] += static_cast<double>(v[i]);
          }
        },
        t.data);
  }
  max_step_ = count_ == 0 ? ckpt.step : std::max(max_step_, ckpt.step);
  ++count_;
}

Checkpoint Averager::result() const {
  if (count_ == 0) {
    throw std::invalid_argument("average of zero checkpoints");
  }
  Checkpoint out;
  out.step = max_step_;
  const auto n = static_cast<double>(count_);
  for (const auto& [name, slot] : slots_) {
    Tensor t;
    t.shape = slot.shape;
    if (slot.dtype == DType::f32) {
      std::vector<float> v(slot.sum.size());
      std::transform(slot.sum.begin(), slot.sum.end(), v.begin(),
                     [n](double s) { return static_cast<float>(s / n); });
      t.data = std::move(v);
    } else {
      std::vector<double> v(slot.sum.size());
      std::transform(slot.sum.begin(), slot.sum.end(), v.begin(), [n](double s) { return s / n; });
      t.data = std::move(v);
    }
    out.tensors.emplace(name, std::move(t));
  }
  return out;
}

Checkpoint average_checkpoints(std::span<const Checkpoint> ckpts) {
  if (ckpts.empty()) {
    throw std::invalid_argument("average of zero checkpoints");
  }
  if (ckpts.size() == 1) {
    ckpts.front().validate();
    return ckpts.front();
  }
  Averager avg;
  for (const auto& c : ckpts) {
    avg.add(c);
  }
  return avg.result();
}

std::vector<std::filesystem::path> select_window(std::span<const CheckpointEntry> listing,
                                                 const AveragingWindow& window) {
  if (window.window_size < 1) {
    throw std::invalid_argument("window size must be >= 1");
  }
  if (listing.empty()) {
    throw std::invalid_argument("no checkpoints to select from");
  }
  std::vector<const CheckpointEntry*> by_time;
  by_time.reserve(listing.size());
  for (const auto& e : listing) {
    by_time.push_back(&e);
  }
  // Newest first; equal mtimes fall back to step, then path, for determinism.
  std::sort(by_time.begin(), by_time.end(), [](const CheckpointEntry* a, const CheckpointEntry* b) {
    if (a->mtime != b->mtime) return a->mtime > b->mtime;
    if (a->step != b->step) return a->step > b->step;
    return a->path > b->path;
  });
  std::vector<std::filesystem::path> picked;
  double last = 0.0;
  for (const auto* e : by_time) {
    if (picked.size() == window.window_size) {
      break;
    }
    if (picked.empty() || last - e->mtime >= window.min_interval) {
      picked.push_back(e->path);
      last = e->mtime;
    }
  }
  std::reverse(picked.begin(), picked.end());
  return picked;
}

double SystemClock::now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

namespace {

double mtime_seconds(const std::filesystem::path& p) {
  const auto t = std::filesystem::last_write_time(p);
  return std::chrono::duration<double>(t.time_since_epoch()).count();
}

struct Seen {
  std::uintmax_t size = 0;
  std::filesystem::file_time_type mtime;
  bool ok = false;
};

}  // namespace

std::vector<Emission> watch_and_average(const std::filesystem::path& dir, const WatchOptions& options, Clock& clock,
                                        const EmitCallback& on_emit, const WarnCallback& warn) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IoError("'" + dir.string() + "' is not a directory");
  }
  if (options.window.window_size < 1) {
    throw std::invalid_argument("window size must be >= 1");
  }
  if (!(options.poll_interval > 0.0) || options.patience < 0.0) {
    throw std::invalid_argument("poll interval must be > 0 and patience >= 0");
  }
  const fs::path out_dir = options.output_dir.empty() ? dir / "averaged" : options.output_dir;
  fs::create_directories(out_dir);

  std::map<fs::path, Seen> seen;
  std::vector<CheckpointEntry> pool;
  std::vector<Emission> emitted;
  std::set<fs::path> outputs;
  double last_new = clock.now();

  for (;;) {
    std::vector<CheckpointEntry> fresh;
    std::vector<fs::path> candidates;
    for (const auto& de : fs::directory_iterator(dir)) {
      const auto& p = de.path();
      const auto name = p.filename().string();
      if (!de.is_regular_file() || p.extension() != ".tlck" || name.starts_with(".") ||
          outputs.contains(p)) {
        continue;
      }
      candidates.push_back(p);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& p : candidates) {
      std::error_code ec;
      const auto size = fs::file_size(p, ec);
      const auto mtime = fs::last_write_time(p, ec);
      if (ec) {
        continue;
      }
      auto it = seen.find(p);
      if (it != seen.end() && (it->second.ok || (it->second.size == size && it->second.mtime == mtime))) {
        continue;
      }
      Seen state{size, mtime, false};
      try {
        // A full read validates the file before it joins the pool.
        const auto ckpt = read_checkpoint(p);
        fresh.push_back({p, ckpt.step, mtime_seconds(p)});
        state.ok = true;
      } catch (const std::exception& e) {
        if (warn) {
          warn("skipping unreadable checkpoint: " + std::string(e.what()));
        }
      }
      seen[p] = state;
    }

    if (!fresh.empty()) {
      last_new = clock.now();
      std::sort(fresh.begin(), fresh.end(), [](const CheckpointEntry& a, const CheckpointEntry& b) {
        return a.step != b.step ? a.step < b.step : a.path < b.path;
      });
      for (auto& entry : fresh) {
        pool.push_back(entry);
        const auto members = select_window(pool, options.window);
        if (members.back() != entry.path) {
          continue;
        }
        Checkpoint result;
        try {
          Averager avg;
          for (const auto& m : members) {
            avg.add(read_checkpoint(m));
          }
          result = avg.result();
        } catch (const std::exception& e) {
          if (warn) {
            warn("cannot average window ending at step " + std::to_string(entry.step) + ": " + e.what());
          }
          continue;
        }
        Emission em{out_dir / ("avg-" + std::to_string(result.step) + ".tlck"), result.step, members};
        write_checkpoint_atomic(result, em.output);
        outputs.insert(em.output);
        if (on_emit) {
          on_emit(em);
        }
        emitted.push_back(std::move(em));
      }
    } else if (clock.now() - last_new >= options.patience) {
      break;
    }
    clock.sleep_for(Clock::duration(options.poll_interval));
  }
  return emitted;
}

}  // namespace trainlab::checkpoints
