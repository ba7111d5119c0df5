#include <istream>
#include <ostream>
#include <string>

#include "focal/error.hpp"
#include "focal/spatial.hpp"

namespace focal {

void write_pgm(std::ostream& out, const GrayImage& image) {
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
}

GrayImage read_pgm(std::istream& in, const std::string& file) {
  std::string magic;
  int maxval = 0;
  GrayImage img;
  in >> magic;
  if (magic != "P5") throw FormatError(file, 0, "not a binary PGM (P5)");
  in >> img.width >> img.height >> maxval;
  if (!in || img.width <= 0 || img.height <= 0 || maxval != 255) {
    throw FormatError(file, static_cast<std::uint64_t>(std::max<std::streamoff>(0, in.tellg())), "bad PGM header");
  }
  in.get();
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  const auto start = in.tellg();
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    throw FormatError(file, static_cast<std::uint64_t>(start) + static_cast<std::uint64_t>(in.gcount()),
                      "truncated PGM raster");
  }
  return img;
}

}  // namespace focal
