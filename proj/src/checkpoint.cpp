#include "maxentdp/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace maxentdp {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  void layers(const ParamSet& p) {
    for (const auto& l : p) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) f64(l.weight(r, c));
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) f64(l.bias[i]);
    }
  }
  [[nodiscard]] std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(s_[pos_++]);
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint64_t count(std::uint64_t limit, const char* what) {
    const std::uint64_t n = u64();
    if (n > limit) throw CheckpointError(std::string("checkpoint: implausible ") + what);
    return n;
  }
  ParamSet layers(const std::vector<int>& widths) {
    ParamSet p;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      need(8 * (static_cast<std::size_t>(widths[i]) + 1) * static_cast<std::size_t>(widths[i + 1]));
      DenseLayer l{Mat(widths[i + 1], widths[i]), Vec(widths[i + 1])};
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = f64();
      for (Eigen::Index k = 0; k < l.bias.size(); ++k) l.bias[k] = f64();
      p.push_back(std::move(l));
    }
    return p;
  }
  void expect(const char* magic, std::size_t n) {
    need(n);
    if (std::memcmp(s_.data() + pos_, magic, n) != 0)
      throw CheckpointError("checkpoint: bad magic or unsupported format version");
    pos_ += n;
  }
  void finish() const {
    if (pos_ != s_.size()) throw CheckpointError("checkpoint: trailing bytes after the last record");
  }

 private:
  void need(std::size_t n) const {
    if (s_.size() - pos_ < n) throw CheckpointError("checkpoint: file is truncated");
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

constexpr std::uint64_t kMaxWidth = 1u << 20;
constexpr std::size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

}  // namespace

bool operator==(const TrainState& a, const TrainState& b) {
  auto same = [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); };
  return a.env_steps == b.env_steps && a.updates == b.updates && a.episodes == b.episodes &&
         a.position == b.position && a.elapsed == b.elapsed && a.finished == b.finished &&
         same(a.episode_return, b.episode_return) && same(a.last_return, b.last_return) && a.buffer == b.buffer;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kCheckpointMagic, kMagicLen);
  w.u64(ckpt.networks.size());
  for (const auto& entry : ckpt.networks) {
    const auto widths = entry.net.widths();
    w.u64(widths.size() - 1);
    for (int width : widths) w.u64(static_cast<std::uint64_t>(width));
    w.layers(entry.net.params());
    w.u8(entry.adam ? 1 : 0);
    if (entry.adam) {
      const Adam& a = *entry.adam;
      w.u64(a.steps());
      w.f64(a.config().lr);
      w.f64(a.config().beta1);
      w.f64(a.config().beta2);
      w.f64(a.config().eps);
      w.layers(a.first_moment());
      w.layers(a.second_moment());
    }
  }
  w.u8(ckpt.train ? 1 : 0);
  if (ckpt.train) {
    const TrainState& t = *ckpt.train;
    w.u64(t.env_steps);
    w.u64(t.updates);
    w.u64(t.episodes);
    w.u64(static_cast<std::uint64_t>(t.position.size()));
    for (Eigen::Index i = 0; i < t.position.size(); ++i) w.f64(t.position[i]);
    w.u64(static_cast<std::uint64_t>(t.elapsed));
    w.u8(t.finished ? 1 : 0);
    w.f64(t.episode_return);
    w.f64(t.last_return);
    w.u8(t.buffer ? 1 : 0);
    if (t.buffer) {
      const ReplayBuffer& b = *t.buffer;
      w.u64(b.capacity());
      w.u64(static_cast<std::uint64_t>(b.state_dim()));
      w.u64(static_cast<std::uint64_t>(b.action_dim()));
      w.u64(b.size());
      w.u64(b.cursor());
      for (double v : b.storage()) w.f64(v);
    }
  }
  return w.take();
}

// GCC 11 reports a spurious maybe-uninitialized on the optional replay buffer.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  r.expect(kCheckpointMagic, kMagicLen);
  Checkpoint ckpt;
  const std::uint64_t nets = r.count(64, "network count");
  for (std::uint64_t n = 0; n < nets; ++n) {
    const std::uint64_t layers = r.count(1024, "layer count");
    if (layers == 0) throw CheckpointError("checkpoint: network without layers");
    std::vector<int> widths;
    for (std::uint64_t i = 0; i <= layers; ++i) {
      const std::uint64_t wdt = r.count(kMaxWidth, "layer width");
      if (wdt == 0) throw CheckpointError("checkpoint: zero layer width");
      widths.push_back(static_cast<int>(wdt));
    }
    NetworkEntry entry{Mlp(r.layers(widths)), std::nullopt};
    const std::uint8_t has_adam = r.u8();
    if (has_adam > 1) throw CheckpointError("checkpoint: corrupt optimizer flag");
    if (has_adam) {
      const std::uint64_t steps = r.u64();
      AdamConfig cfg;
      cfg.lr = r.f64();
      cfg.beta1 = r.f64();
      cfg.beta2 = r.f64();
      cfg.eps = r.f64();
      ParamSet m = r.layers(widths);
      ParamSet v = r.layers(widths);
      entry.adam = Adam::restore(cfg, steps, std::move(m), std::move(v));
    }
    ckpt.networks.push_back(std::move(entry));
  }
  const std::uint8_t has_train = r.u8();
  if (has_train > 1) throw CheckpointError("checkpoint: corrupt training-state flag");
  if (has_train) {
    TrainState t;
    t.env_steps = r.u64();
    t.updates = r.u64();
    t.episodes = r.u64();
    t.position.resize(static_cast<Eigen::Index>(r.count(kMaxWidth, "position size")));
    for (Eigen::Index i = 0; i < t.position.size(); ++i) t.position[i] = r.f64();
    t.elapsed = static_cast<std::int64_t>(r.u64());
    t.finished = r.u8() != 0;
    t.episode_return = r.f64();
    t.last_return = r.f64();
    if (r.u8()) {
      const std::uint64_t capacity = r.u64();
      const auto sdim = static_cast<int>(r.count(kMaxWidth, "state dimension"));
      const auto adim = static_cast<int>(r.count(kMaxWidth, "action dimension"));
      const std::uint64_t size = r.u64();
      const std::uint64_t cursor = r.u64();
      if (size > capacity || capacity == 0) throw CheckpointError("checkpoint: inconsistent replay buffer");
      const std::uint64_t stride = 2 * static_cast<std::uint64_t>(sdim) + static_cast<std::uint64_t>(adim) + 2;
      if (size > (bytes.size() / 8) / stride) throw CheckpointError("checkpoint: file is truncated");
      std::vector<double> data(size * stride);
      for (double& v : data) v = r.f64();
      try {
        t.buffer.emplace(ReplayBuffer::restore(capacity, sdim, adim, size, cursor, std::move(data)));
      } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("checkpoint: ") + e.what());
      }
    }
    ckpt.train.emplace(std::move(t));
  }
  r.finish();
  return ckpt;
}
#pragma GCC diagnostic pop

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) { write_file_atomic(path, encode_checkpoint(ckpt)); }

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace maxentdp
