#pragma once

// Binary cache of prime-power T-vectors.
//
// Layout (all little-endian):
//   "CBT1" | p : u64 | l : u64 | n = p^l : u64 | n x i64 values T_a(p^l), a = 0..n-1
//
// Writes go to a temporary file that is renamed into place, so readers never
// observe a partially written entry.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "cubes/arith.hpp"

namespace cubes {

inline constexpr std::array<char, 4> kCacheMagic{'C', 'B', 'T', '1'};
inline constexpr const char* kCacheDirEnv = "CUBES_CACHE_DIR";

namespace detail {

inline void put_u64(std::ostream& os, u64 v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

inline bool get_u64(std::istream& is, u64& v) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<u64>(b[i]) << (8 * i);
  return true;
}

}  // namespace detail

/// The cache directory: the environment variable wins over the flag value.
inline std::optional<std::filesystem::path> resolve_cache_dir(const std::string& flag_value) {
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  if (!flag_value.empty()) return std::filesystem::path(flag_value);
  return std::nullopt;
}

inline std::filesystem::path cache_file_path(const std::filesystem::path& dir, u64 p, int l) {
  return dir / ("T_" + std::to_string(p) + "_" + std::to_string(l) + ".cbt");
}

inline void write_cache_entry(const std::filesystem::path& file, u64 p, int l,
                              const std::vector<i64>& values) {
  std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write cache file " + tmp.string());
    os.write(kCacheMagic.data(), 4);
    detail::put_u64(os, p);
    detail::put_u64(os, static_cast<u64>(l));
    detail::put_u64(os, values.size());
    for (i64 v : values) detail::put_u64(os, static_cast<u64>(v));
    if (!os) throw std::runtime_error("short write to cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

/// Returns the cached values, or nullopt if the file is absent or does not
/// match (p, l). A malformed file is treated as a miss.
inline std::optional<std::vector<i64>> read_cache_entry(const std::filesystem::path& file, u64 p,
                                                        int l) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || magic != kCacheMagic) return std::nullopt;
  u64 fp = 0, fl = 0, n = 0;
  if (!detail::get_u64(is, fp) || !detail::get_u64(is, fl) || !detail::get_u64(is, n)) {
    return std::nullopt;
  }
  if (fp != p || fl != static_cast<u64>(l) || n != ipow(p, l)) return std::nullopt;
  std::vector<i64> values(n);
  for (u64 i = 0; i < n; ++i) {
    u64 raw = 0;
    if (!detail::get_u64(is, raw)) return std::nullopt;
    values[i] = static_cast<i64>(raw);
  }
  return values;
}

}  // namespace cubes
