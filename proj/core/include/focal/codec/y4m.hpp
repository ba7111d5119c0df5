#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "focal/codec/video.hpp"

namespace focal::codec {

enum class Chroma { C420, C422, C444, Mono };

struct Y4mHeader {
  int width = 0;
  int height = 0;
  int fps_num = 30;
  int fps_den = 1;
  Chroma chroma = Chroma::C420;
};

// Parses the stream header line ("YUV4MPEG2 W.. H.. F..:.. ...").
Y4mHeader parse_y4m_header(const std::string& line, const std::string& file = "<header>");

// Reads an 8-bit YUV4MPEG2 stream and keeps only the luma plane of every frame.
// Throws FormatError on a malformed header or a truncated frame.
VideoSequence read_y4m(std::istream& in, const std::string& file = "<stream>");
VideoSequence load_y4m(const std::filesystem::path& path);

// Writes 4:2:0 with neutral chroma; luma is rounded and clamped to 0..255.
void write_y4m(std::ostream& out, const VideoSequence& video);
void save_y4m(const std::filesystem::path& path, const VideoSequence& video);

}  // namespace focal::codec
