#include "toposq/hash.hpp"

#include <cmath>
#include <cstdio>

namespace toposq {

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::int64_t quantize(double x, double resolution) {
    return static_cast<std::int64_t>(std::llround(x / resolution));
}

}  // namespace toposq
