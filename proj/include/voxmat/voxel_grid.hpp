#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace voxmat {

// Periodic cubic occupancy grid. Bit i = voxel (x, y, z) with
// i = x + n*(y + n*z); bits are packed LSB-first within each byte.
class VoxelGrid {
 public:
  explicit VoxelGrid(int n) : n_(n) {
    if (n < 4) throw std::invalid_argument("VoxelGrid: resolution must be >= 4");
    bits_.assign((cell_count() + 7) / 8, 0);
  }

  int resolution() const { return n_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }

  std::size_t flat_index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(n_) * static_cast<std::size_t>(z));
  }

  bool solid(int x, int y, int z) const {
    const std::size_t i = flat_index(x, y, z);
    return (bits_[i >> 3] >> (i & 7)) & 1;
  }

  bool solid_wrapped(int x, int y, int z) const {
    return solid(wrap(x), wrap(y), wrap(z));
  }

  void set(int x, int y, int z, bool value) {
    const std::size_t i = flat_index(x, y, z);
    if (value)
      bits_[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    else
      bits_[i >> 3] &= static_cast<std::uint8_t>(~(1u << (i & 7)));
  }

  std::size_t solid_count() const {
    std::size_t count = 0;
    for (std::uint8_t b : bits_) count += static_cast<std::size_t>(__builtin_popcount(b));
    return count;
  }

  int wrap(int i) const {
    i %= n_;
    return i < 0 ? i + n_ : i;
  }

  bool operator==(const VoxelGrid& other) const {
    return n_ == other.n_ && bits_ == other.bits_;
  }

  // FNV-1a over the packed bits; used as a memoization key.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    h = (h ^ static_cast<std::uint64_t>(n_)) * 1099511628211ull;
    for (std::uint8_t b : bits_) h = (h ^ b) * 1099511628211ull;
    return h;
  }

  // Binary format: "VOXG" magic, u32 version, u32 n, u32 reserved (all
  // little-endian), then the packed occupancy bits.
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write voxel file: " + path.string());
    const char magic[4] = {'V', 'O', 'X', 'G'};
    out.write(magic, 4);
    write_u32(out, 1u);
    write_u32(out, static_cast<std::uint32_t>(n_));
    write_u32(out, 0u);
    out.write(reinterpret_cast<const char*>(bits_.data()),
              static_cast<std::streamsize>(bits_.size()));
    if (!out) throw std::runtime_error("short write on voxel file: " + path.string());
  }

  static VoxelGrid load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open voxel file: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VOXG", 4) != 0)
      throw std::runtime_error("bad voxel file magic: " + path.string());
    const std::uint32_t version = read_u32(in);
    if (version != 1u)
      throw std::runtime_error("unsupported voxel file version " +
                               std::to_string(version));
    const std::uint32_t n = read_u32(in);
    read_u32(in);  // reserved
    if (n < 4 || n > 4096)
      throw std::runtime_error("voxel file resolution out of range");
    VoxelGrid grid(static_cast<int>(n));
    in.read(reinterpret_cast<char*>(grid.bits_.data()),
            static_cast<std::streamsize>(grid.bits_.size()));
    if (!in) throw std::runtime_error("truncated voxel file: " + path.string());
    return grid;
  }

 private:
  static void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff),
                   static_cast<char>((v >> 24) & 0xff)};
    out.write(buf, 4);
  }
  static std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4] = {0, 0, 0, 0};
    in.read(reinterpret_cast<char*>(buf), 4);
    return static_cast<std::uint32_t>(buf[0]) |
           (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) |
           (static_cast<std::uint32_t>(buf[3]) << 24);
  }

  int n_;
  std::vector<std::uint8_t> bits_;
};

inline double volume_fraction(const VoxelGrid& grid) {
  return static_cast<double>(grid.solid_count()) /
         static_cast<double>(grid.cell_count());
}

// True iff the solid phase is one 6-connected component under periodic
// wraparound. Fully void grids are not connected.
inline bool connectivity_check(const VoxelGrid& grid) {
  const int n = grid.resolution();
  const std::size_t total = grid.solid_count();
  if (total == 0) return false;

  std::vector<std::uint8_t> visited(grid.cell_count(), 0);
  std::vector<std::size_t> stack;
  stack.reserve(1024);

  std::size_t start = 0;
  bool found = false;
  for (int z = 0; z < n && !found; ++z)
    for (int y = 0; y < n && !found; ++y)
      for (int x = 0; x < n && !found; ++x)
        if (grid.solid(x, y, z)) {
          start = grid.flat_index(x, y, z);
          found = true;
        }

  stack.push_back(start);
  visited[start] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    ++reached;
    const int x = static_cast<int>(i % n);
    const int y = static_cast<int>((i / n) % n);
    const int z = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
    const int nx[6] = {grid.wrap(x - 1), grid.wrap(x + 1), x, x, x, x};
    const int ny[6] = {y, y, grid.wrap(y - 1), grid.wrap(y + 1), y, y};
    const int nz[6] = {z, z, z, z, grid.wrap(z - 1), grid.wrap(z + 1)};
    for (int d = 0; d < 6; ++d) {
      if (!grid.solid(nx[d], ny[d], nz[d])) continue;
      const std::size_t j = grid.flat_index(nx[d], ny[d], nz[d]);
      if (!visited[j]) {
        visited[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return reached == total;
}

}  // namespace voxmat
