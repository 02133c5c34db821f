#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlscape/learner.hpp"

namespace rlscape {

// Binary checkpoint format, version 1. All integers and bit patterns are
// little-endian regardless of host byte order; reals are raw binary64 bits.
//
//   magic "RLSCKPT1" (8 bytes)
//   u32 format version
//   string env name, u64 seed, u64 config hash, i64 step
//   actor network (shape descriptor + flat parameter array)
//   u8 has_full
//   [full learner state: environment, learner config, run seed, six
//    networks, three optimizer-moment blocks, replay buffer in physical
//    order with its write cursor, environment cursor, counters]
//   u32 CRC-32 over everything above
//
// load(save(x)) is bitwise lossless. Truncated or bit-flipped files fail the
// CRC (or bounds checks) and raise CheckpointError before any state is
// returned; an unsupported version raises CheckpointError naming both
// versions. The ephemeral stream salt is deliberately not stored.
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Explicit error when a loaded actor does not match the architecture the
// caller's configuration implies.
void require_shape(const Checkpoint& ckpt, const MlpShape& expected);

// Human-readable JSON summary (dimensions, counters, hashes) for debugging;
// not a serialization format.
std::string checkpoint_debug_json(const Checkpoint& ckpt);

}  // namespace rlscape
