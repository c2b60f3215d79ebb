#ifndef CAUSAL_CPD_FILE_UTIL_HPP
#define CAUSAL_CPD_FILE_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ccpd {

/// Writes through a sibling temp file and renames it into place.
/// Throws DataError on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Whole file as a string; DataError when unreadable.
std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace ccpd

#endif  // CAUSAL_CPD_FILE_UTIL_HPP
