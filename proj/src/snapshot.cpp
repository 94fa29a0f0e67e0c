#include "mhdlab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mhd {
namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot IO assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("truncated snapshot");
  return value;
}

}  // namespace

void Snapshot::add(const std::string& name, const ScalarField& f) {
  if (name.empty() || name.size() > 16) throw std::invalid_argument("field name must be 1..16 chars");
  if (!(f.grid == grid)) throw std::invalid_argument("snapshot field on a different grid");
  fields.emplace_back(name, f);
}

const ScalarField& Snapshot::at(const std::string& name) const {
  for (const auto& [key, field] : fields) {
    if (key == name) return field;
  }
  throw std::out_of_range("snapshot has no field '" + name + "'");
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os.write("MHDP", 4);
  put<std::uint32_t>(os, Snapshot::kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(snap.grid.n()));
  put<double>(os, snap.grid.length());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(snap.fields.size()));
  for (const auto& [name, field] : snap.fields) {
    char label[16] = {};
    std::memcpy(label, name.data(), name.size());
    os.write(label, 16);
    os.write(reinterpret_cast<const char*>(field.values.data()),
             static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MHDP", 4) != 0) throw std::runtime_error("bad snapshot magic");
  const auto version = get<std::uint32_t>(is);
  if (version != Snapshot::kVersion) throw std::runtime_error("unsupported snapshot version");
  const auto n = get<std::uint32_t>(is);
  const auto length = get<double>(is);
  const auto count = get<std::uint32_t>(is);
  Snapshot snap(Grid(static_cast<int>(n), length));
  for (std::uint32_t i = 0; i < count; ++i) {
    char label[17] = {};
    is.read(label, 16);
    ScalarField f(snap.grid);
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated snapshot payload");
    snap.fields.emplace_back(std::string(label), std::move(f));
  }
  return snap;
}

}  // namespace mhd
