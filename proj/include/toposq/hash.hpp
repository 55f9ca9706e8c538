#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace toposq {

/// FNV-1a 64-bit, rendered as 16 lowercase hex digits. Stable across runs
/// and platforms; used for context ids, subobject keys and cache names.
std::string content_hash(std::string_view bytes);

/// Rounds x to an integer multiple of `resolution` (returned as the multiple).
std::int64_t quantize(double x, double resolution);

}  // namespace toposq
