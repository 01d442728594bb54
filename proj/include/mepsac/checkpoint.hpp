#pragma once

#include <string>

#include "mepsac/agent.hpp"

namespace mepsac {

inline constexpr const char* kCheckpointFormat = "mepsac.checkpoint.v1";

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON file with a format tag: layer dims, weights and biases row-major,
// the actor log_std, the entropy coefficient, and all Adam moments.
void save_checkpoint(const std::string& path, const SacState& sac);

// Throws CheckpointError on a missing file or a format-tag mismatch.
SacState load_checkpoint(const std::string& path);

}  // namespace mepsac
