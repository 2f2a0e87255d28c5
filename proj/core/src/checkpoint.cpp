#include "sacd/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sacd {
namespace {

constexpr char kMagic[8] = {'S', 'A', 'C', 'D', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

}  // namespace

void Checkpoint::add(std::string name, std::vector<double> values) {
  blocks.emplace_back(std::move(name), std::move(values));
}

const std::vector<double>& Checkpoint::get(std::string_view name) const {
  for (const auto& [n, v] : blocks)
    if (n == name) return v;
  throw std::runtime_error("checkpoint: missing block '" + std::string(name) + "'");
}

bool Checkpoint::has(std::string_view name) const {
  for (const auto& [n, v] : blocks)
    if (n == name) return true;
  return false;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, ckpt.config_hash);
  write_pod(out, ckpt.step);
  write_pod(out, static_cast<std::uint32_t>(ckpt.blocks.size()));
  for (const auto& [name, values] : ckpt.blocks) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::uint64_t>(values.size()));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  Checkpoint ckpt;
  ckpt.config_hash = read_pod<std::uint64_t>(in);
  ckpt.step = read_pod<std::int64_t>(in);
  const std::uint32_t nblocks = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < nblocks; ++i) {
    const std::uint32_t name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint64_t count = read_pod<std::uint64_t>(in);
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated block in " + path.string());
    ckpt.blocks.emplace_back(std::move(name), std::move(values));
  }
  return ckpt;
}

}  // namespace sacd
