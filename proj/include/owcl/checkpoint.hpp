#pragma once

#include <cstdint>
#include <string>

#include "owcl/classifier.hpp"
#include "owcl/memory.hpp"

namespace owcl {

struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kCheckpointVersion = 1;

/// Everything needed to resume or inspect a run: the model (with its frozen
/// distillation teacher, when present), the exemplar memory, and the
/// experiment seed. Round-trips are bit-exact.
struct Checkpoint {
  ModelState model;
  ExemplarMemory memory;
  std::uint64_t seed = 0;
};

/// Validates the model, then writes a versioned JSON container. Nothing is
/// written when validation fails.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);

/// Parses and validates a checkpoint file. Unreadable files, wrong container
/// formats, and version mismatches raise CheckpointError with messages that
/// say which of the three went wrong.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace owcl
