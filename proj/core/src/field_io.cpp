#include "decaylab/field_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "decaylab/errors.hpp"

namespace decaylab {

static_assert(std::endian::native == std::endian::little,
              "field binary format is little-endian");

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_snapshot_csv(const FieldSnapshot& s, std::ostream& out) {
  const auto v = s.value();
  const auto q = s.rate();
  const auto m = s.mask();
  if (s.is_radial()) {
    out << "r,value,rate,mask\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << fmt17(s.position(i)[0]) << ',' << fmt17(v[i]) << ',' << fmt17(q[i])
          << ',' << int(m[i]) << '\n';
    }
    return;
  }
  out << "x,y,z,value,rate,mask\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 x = s.position(i);
    out << fmt17(x[0]) << ',' << fmt17(x[1]) << ',' << fmt17(x[2]) << ','
        << fmt17(v[i]) << ',' << fmt17(q[i]) << ',' << int(m[i]) << '\n';
  }
}

void write_field_binary(const FieldSnapshot& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open " + path.string() + " for writing");
  }
  std::ostringstream header;
  header << "DECAYLAB-FIELD 1\n";
  if (s.is_radial()) {
    const auto& g = s.radial_grid();
    header << "grid radial\n"
           << "dims " << g.size() << "\n"
           << "extent " << fmt17(g.r_max()) << "\n";
  } else {
    const auto& g = s.cartesian_grid();
    header << "grid cartesian\n"
           << "dims " << g.size() << ' ' << g.size() << ' ' << g.size() << "\n"
           << "extent " << fmt17(g.half_width()) << "\n";
  }
  header << "spacing " << fmt17(s.spacing()) << "\n"
         << "time " << fmt17(s.time()) << "\n"
         << "frame " << to_string(s.frame()) << "\n"
         << "layout value:f64le rate:f64le mask:u8\n"
         << "end\n";
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(s.value().data()),
            static_cast<std::streamsize>(s.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(s.rate().data()),
            static_cast<std::streamsize>(s.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(s.mask().data()),
            static_cast<std::streamsize>(s.size()));
  if (!out) {
    throw ConfigError("short write to " + path.string());
  }
}

FieldSnapshot read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  std::string line;
  std::getline(in, line);
  if (line != "DECAYLAB-FIELD 1") {
    throw ConfigError(path.string() + ": not a DECAYLAB-FIELD 1 file");
  }
  std::string grid_kind, frame = "physical";
  std::size_t n = 0;
  double extent = 0.0, time = 0.0;
  while (std::getline(in, line) && line != "end") {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "grid") {
      ls >> grid_kind;
    } else if (key == "dims") {
      ls >> n;
    } else if (key == "extent") {
      ls >> extent;
    } else if (key == "time") {
      ls >> time;
    } else if (key == "frame") {
      ls >> frame;
    }
  }
  if (line != "end" || n == 0) {
    throw ConfigError(path.string() + ": truncated header");
  }
  GridVariant grid = grid_kind == "radial"
                         ? GridVariant(RadialGrid::with_points(extent, n))
                         : GridVariant(CartesianGrid3::make(extent, n));
  const std::size_t count = grid_kind == "radial" ? n : n * n * n;
  std::vector<double> value(count), rate(count);
  std::vector<std::uint8_t> mask(count);
  in.read(reinterpret_cast<char*>(value.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(rate.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(count));
  if (!in) {
    throw ConfigError(path.string() + ": truncated payload");
  }
  return FieldSnapshot(frame_from_string(frame), time, std::move(grid),
                       std::move(value), std::move(rate), std::move(mask));
}

}  // namespace decaylab
