#include "nematic/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace nematic {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& base, const char* ext) {
  std::filesystem::path p = base;
  p += ext;
  return p;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& base, const Snapshot& snap) {
  const auto bin = with_ext(base, ".bin");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + bin.string());
  for (const Samples& c : snap.components) {
    if (c.size() != snap.grid.size()) throw std::invalid_argument("snapshot component size mismatch");
    for (double v : c) {
      const std::uint64_t w = to_le(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&w), 8);
    }
  }
  nlohmann::json j;
  j["nx"] = snap.grid.nx;
  j["ny"] = snap.grid.ny;
  j["bc_mode"] = to_string(snap.grid.bc);
  j["time"] = snap.time;
  j["component_names"] = snap.component_names;
  std::ofstream side(with_ext(base, ".json"));
  if (!side) throw std::runtime_error("cannot write " + with_ext(base, ".json").string());
  side << j.dump(2) << "\n";
}

Snapshot read_snapshot(const std::filesystem::path& base) {
  const auto side_path = with_ext(base, ".json");
  std::ifstream side(side_path);
  if (!side) throw std::runtime_error(side_path.string() + ": missing");
  Snapshot snap;
  try {
    const auto j = nlohmann::json::parse(side);
    snap.grid = Grid(j.at("nx").get<int>(), j.at("ny").get<int>(),
                     bc_mode_from_string(j.at("bc_mode").get<std::string>()));
    snap.time = j.at("time").get<double>();
    snap.component_names = j.at("component_names").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    throw std::runtime_error(side_path.string() + ": " + e.what());
  }
  const auto bin = with_ext(base, ".bin");
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw std::runtime_error(bin.string() + ": missing");
  const std::size_t n = snap.grid.size();
  for (std::size_t c = 0; c < snap.component_names.size(); ++c) {
    Samples s(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t w = 0;
      if (!in.read(reinterpret_cast<char*>(&w), 8)) {
        throw std::runtime_error(bin.string() + ": truncated");
      }
      s[k] = std::bit_cast<double>(to_le(w));
    }
    snap.components.push_back(std::move(s));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error(bin.string() + ": trailing data");
  }
  return snap;
}

Snapshot director_snapshot(const Grid& g, double t, const VectorField& d) {
  Snapshot s;
  s.grid = g;
  s.time = t;
  s.component_names = {"d_x", "d_y"};
  s.components = {d.c[0], d.c[1]};
  return s;
}

VectorField director_from_snapshot(const Snapshot& snap) {
  if (snap.components.size() < 2) throw std::runtime_error("snapshot has fewer than 2 components");
  VectorField d(snap.grid, FieldRole::director);
  d.c[0] = snap.components[0];
  d.c[1] = snap.components[1];
  return d;
}

}  // namespace nematic
