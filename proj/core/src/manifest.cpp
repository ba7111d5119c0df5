#include "focal/harness/manifest.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "focal/digest.hpp"
#include "focal/error.hpp"

namespace focal::harness {

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
  std::ofstream out(manifest_path(), std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create manifest in " + root_.string());
}

void RunDirectory::record(const std::string& kind, const std::map<std::string, std::string>& fields) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  for (const auto& [k, v] : fields) j[k] = v;
  std::ofstream out(manifest_path(), std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + manifest_path().string());
  out << j.dump() << '\n';
}

void RunDirectory::record_file(const std::string& kind, const std::string& relative,
                               std::map<std::string, std::string> fields) {
  fields["path"] = relative;
  fields["digest"] = to_hex(file_digest(path(relative)));
  record(kind, fields);
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  Fnv1a h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return h.value();
}

}  // namespace focal::harness
