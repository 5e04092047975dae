#include "coex/ndgrad/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "coex/util/errors.hpp"

namespace coex::nd {

namespace {

constexpr char kMagic[4] = {'C', 'O', 'E', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return true;
}

bool get_u64(std::istream& is, std::uint64_t& v) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  for (const auto& [name, entry] : params) {
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& shape = entry.value.shape();
    put_u32(os, static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) put_u64(os, d);
    for (std::size_t i = 0; i < entry.value.numel(); ++i) put_f64(os, entry.value[i]);
  }
  if (!os) throw ConfigError("checkpoint write failed: " + path);
}

ParamSet load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw ConfigError("not a COEX checkpoint: " + path);
  }
  std::uint32_t version = 0;
  if (!get_u32(is, version) || version != kVersion) {
    throw ConfigError("unsupported checkpoint version in " + path);
  }
  ParamSet out;
  std::uint32_t name_len = 0;
  while (get_u32(is, name_len)) {
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw ConfigError("truncated checkpoint: " + path);
    std::uint32_t rank = 0;
    if (!get_u32(is, rank)) throw ConfigError("truncated checkpoint: " + path);
    std::vector<std::size_t> shape(rank);
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      std::uint64_t dim = 0;
      if (!get_u64(is, dim)) throw ConfigError("truncated checkpoint: " + path);
      shape[d] = static_cast<std::size_t>(dim);
      numel *= shape[d];
    }
    Tensor t(shape);
    for (std::size_t i = 0; i < numel; ++i) {
      std::uint64_t bits = 0;
      if (!get_u64(is, bits)) throw ConfigError("truncated checkpoint: " + path);
      t[i] = std::bit_cast<double>(bits);
    }
    out.add(name, std::move(t));
  }
  return out;
}

}  // namespace coex::nd
