#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace noncollide {

// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(std::string_view data);

// Shortest-17-significant-digit rendering used by every CSV writer.
std::string fmt17(double x);

// Embedded in the header lines of every output artifact so a file is
// regenerable from its own metadata.
struct Provenance {
    std::uint64_t seed = 0;
    std::string spec_hash;
    std::string scheme;
    std::string version;
};

std::string provenance_header(const Provenance& p);

}  // namespace noncollide
