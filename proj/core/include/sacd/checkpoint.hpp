#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sacd {

/// Versioned binary container of named double blocks. Exact layout, all
/// integers and doubles little-endian:
///   magic "SACDCKP1" (8 bytes)
///   config_hash  u64   FNV-1a of the canonical config JSON
///   step         i64
///   block_count  u32
///   then per block: name_len u32, name bytes, value_count u64,
///   values as IEEE-754 binary64.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::int64_t step = 0;
  std::vector<std::pair<std::string, std::vector<double>>> blocks;

  void add(std::string name, std::vector<double> values);
  const std::vector<double>& get(std::string_view name) const;
  bool has(std::string_view name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace sacd
