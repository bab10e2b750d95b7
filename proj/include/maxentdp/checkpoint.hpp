#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxentdp/mlp.hpp"
#include "maxentdp/sac.hpp"

namespace maxentdp {

/// Bad magic, truncation, trailing bytes or inconsistent shapes.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkEntry {
  Mlp net;
  std::optional<Adam> adam;

  friend bool operator==(const NetworkEntry&, const NetworkEntry&) = default;
};

/// Everything needed to continue a run exactly where it stopped.
struct TrainState {
  std::uint64_t env_steps = 0;
  std::uint64_t updates = 0;
  std::uint64_t episodes = 0;
  Vec position;
  std::int64_t elapsed = 0;
  bool finished = true;
  double episode_return = 0;
  double last_return = std::numeric_limits<double>::quiet_NaN();
  std::optional<ReplayBuffer> buffer;

  friend bool operator==(const TrainState& a, const TrainState& b);
};

struct Checkpoint {
  std::vector<NetworkEntry> networks;
  std::optional<TrainState> train;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr char kCheckpointMagic[] = "MXDP1";

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace maxentdp
