#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace recbias {

/// SHA-256 hex digest (64 lowercase hex chars).
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256, big-endian. Stable across platforms; used for
/// seeded mock decisions.
std::uint64_t sha256_u64(std::string_view data);

}  // namespace recbias
