#pragma once

#include <string>

#include "dcb/frames.hpp"

namespace dcb {

/// Bit-exact frame container, always little-endian on disk:
///   "MCFR" magic (4 bytes) | version u16 = 1 | reserved u16 = 0 |
///   T, H, W as u32 | T*H*W float64 values, row-major, frame-major.
/// One sequence per file. Reads reject foreign endianness, bad magic,
/// unknown versions, truncation, and non-finite payloads, always naming the
/// byte offset of the problem.
void write_frames(const std::string& path, const FrameSequence& seq);
FrameSequence read_frames(const std::string& path);

}  // namespace dcb
