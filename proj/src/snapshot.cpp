#include "absq/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace absq {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot IO assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw std::runtime_error("snapshot: truncated header");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const Field& f, PayloadKind kind) {
  const Grid& g = f.grid();
  os.write("ABSQ", 4);
  put<std::uint32_t>(os, snapshot_version);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n1()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n2()));
  put<double>(os, g.half_width());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(kind));
  put<std::uint32_t>(os, 0);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!os) throw std::runtime_error("snapshot: write failed");
}

void write_snapshot(const std::filesystem::path& path, const Field& f, PayloadKind kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string());
  write_snapshot(os, f, kind);
}

Snapshot read_snapshot(std::istream& is, GridPtr grid) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || std::memcmp(magic.data(), "ABSQ", 4) != 0)
    throw std::runtime_error("snapshot: bad magic");
  const auto version = get<std::uint32_t>(is);
  if (version != snapshot_version)
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
  const auto n1 = get<std::uint32_t>(is);
  const auto n2 = get<std::uint32_t>(is);
  const auto L = get<double>(is);
  const auto kind = get<std::uint32_t>(is);
  (void)get<std::uint32_t>(is);
  if (kind > static_cast<std::uint32_t>(PayloadKind::full_temperature))
    throw std::runtime_error("snapshot: unknown payload kind");

  if (grid) {
    if (grid->n1() != static_cast<int>(n1) || grid->n2() != static_cast<int>(n2) ||
        grid->half_width() != L)
      throw std::runtime_error("snapshot: header does not match the supplied grid");
  } else {
    grid = make_grid({static_cast<int>(n1), static_cast<int>(n2), L});
  }
  std::vector<double> values(grid->size());
  if (!is.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double))))
    throw std::runtime_error("snapshot: truncated payload");
  return {Field(grid, std::move(values)), static_cast<PayloadKind>(kind)};
}

Snapshot read_snapshot(const std::filesystem::path& path, GridPtr grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  return read_snapshot(is, std::move(grid));
}

Field full_temperature(const Field& theta) {
  Field out = theta;
  const auto& x2 = theta.grid().x2_nodes();
  for (int j = 0; j < theta.grid().n2(); ++j)
    for (int i = 0; i < theta.grid().n1(); ++i) out.at(i, j) += x2[j];
  return out;
}

}  // namespace absq
