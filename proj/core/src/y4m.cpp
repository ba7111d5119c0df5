#include "focal/codec/y4m.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "focal/error.hpp"

namespace focal::codec {
namespace {

constexpr std::size_t kMaxHeaderLine = 4096;

std::size_t chroma_plane_size(const Y4mHeader& h) {
  const auto w = static_cast<std::size_t>(h.width);
  const auto hh = static_cast<std::size_t>(h.height);
  switch (h.chroma) {
    case Chroma::C420:
      return ((w + 1) / 2) * ((hh + 1) / 2);
    case Chroma::C422:
      return ((w + 1) / 2) * hh;
    case Chroma::C444:
      return w * hh;
    case Chroma::Mono:
      return 0;
  }
  return 0;
}

int parse_positive(const std::string& text, const std::string& file, std::uint64_t offset, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v <= 0) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw FormatError(file, offset, std::string("invalid ") + what + " '" + text + "'");
  }
}

// Reads one '\n'-terminated line; returns false at a clean end of stream.
bool read_line(std::istream& in, std::string& line, std::uint64_t& offset, const std::string& file) {
  line.clear();
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') {
      offset += line.size() + 1;
      return true;
    }
    line.push_back(c);
    if (line.size() > kMaxHeaderLine) throw FormatError(file, offset, "header line too long");
  }
  if (line.empty()) return false;
  throw FormatError(file, offset + line.size(), "unterminated header line");
}

}  // namespace

Y4mHeader parse_y4m_header(const std::string& line, const std::string& file) {
  std::vector<std::pair<std::string, std::uint64_t>> tokens;
  for (std::size_t pos = line.find_first_not_of(' '); pos != std::string::npos;) {
    const std::size_t end = std::min(line.find(' ', pos), line.size());
    tokens.emplace_back(line.substr(pos, end - pos), pos);
    pos = line.find_first_not_of(' ', end);
  }
  if (tokens.empty() || tokens[0].first != "YUV4MPEG2") throw FormatError(file, 0, "missing YUV4MPEG2 signature");
  Y4mHeader h;
  bool have_w = false;
  bool have_h = false;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const auto& [token, offset] = tokens[t];
    const char key = token[0];
    const std::string value = token.substr(1);
    switch (key) {
      case 'W':
        h.width = parse_positive(value, file, offset, "width");
        have_w = true;
        break;
      case 'H':
        h.height = parse_positive(value, file, offset, "height");
        have_h = true;
        break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw FormatError(file, offset, "frame rate must be num:den");
        h.fps_num = parse_positive(value.substr(0, colon), file, offset, "frame-rate numerator");
        h.fps_den = parse_positive(value.substr(colon + 1), file, offset, "frame-rate denominator");
        break;
      }
      case 'C':
        if (value == "420" || value == "420jpeg" || value == "420paldv" || value == "420mpeg2") {
          h.chroma = Chroma::C420;
        } else if (value == "422") {
          h.chroma = Chroma::C422;
        } else if (value == "444") {
          h.chroma = Chroma::C444;
        } else if (value == "mono") {
          h.chroma = Chroma::Mono;
        } else {
          throw FormatError(file, offset, "unsupported colour space C" + value + " (8-bit 420/422/444/mono only)");
        }
        break;
      case 'I':
      case 'A':
      case 'X':
        break;
      default:
        throw FormatError(file, offset, "unknown header field '" + token + "'");
    }
  }
  if (!have_w || !have_h) throw FormatError(file, 0, "header lacks W or H");
  return h;
}

VideoSequence read_y4m(std::istream& in, const std::string& file) {
  std::uint64_t offset = 0;
  std::string line;
  if (!read_line(in, line, offset, file)) throw FormatError(file, 0, "empty file");
  const Y4mHeader h = parse_y4m_header(line, file);

  VideoSequence video;
  video.width = h.width;
  video.height = h.height;
  video.fps_num = h.fps_num;
  video.fps_den = h.fps_den;
  const std::size_t luma = static_cast<std::size_t>(h.width) * h.height;
  const std::size_t chroma = 2 * chroma_plane_size(h);
  std::vector<unsigned char> buffer(luma + chroma);
  for (std::size_t index = 0;; ++index) {
    const std::uint64_t frame_start = offset;
    if (!read_line(in, line, offset, file)) break;
    if (!line.starts_with("FRAME")) {
      throw FormatError(file, frame_start, "expected FRAME marker for frame " + std::to_string(index));
    }
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != buffer.size()) {
      throw FormatError(file, offset + got,
                        "truncated payload in frame " + std::to_string(index) + " (" + std::to_string(got) + " of " +
                            std::to_string(buffer.size()) + " bytes)");
    }
    offset += got;
    Frame f(h.width, h.height);
    std::transform(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(luma), f.pixels.begin(),
                   [](unsigned char v) { return static_cast<float>(v); });
    video.frames.push_back(std::move(f));
  }
  if (video.frames.empty()) throw FormatError(file, offset, "stream contains no frames");
  return video;
}

VideoSequence load_y4m(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  return read_y4m(in, path.string());
}

void write_y4m(std::ostream& out, const VideoSequence& video) {
  video.validate();
  out << "YUV4MPEG2 W" << video.width << " H" << video.height << " F" << video.fps_num << ':' << video.fps_den
      << " Ip A1:1 C420jpeg\n";
  const std::size_t luma = static_cast<std::size_t>(video.width) * video.height;
  const std::size_t chroma = static_cast<std::size_t>((video.width + 1) / 2) * ((video.height + 1) / 2);
  std::vector<unsigned char> buffer(luma + 2 * chroma, 128);
  for (const auto& f : video.frames) {
    for (std::size_t k = 0; k < luma; ++k) {
      buffer[k] = static_cast<unsigned char>(std::clamp(std::lround(f.pixels[k]), 0L, 255L));
    }
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  }
}

void save_y4m(const std::filesystem::path& path, const VideoSequence& video) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_y4m(out, video);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace focal::codec
