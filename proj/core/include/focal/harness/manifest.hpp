#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace focal::harness {

// A run directory with a JSON-lines manifest. Each record names an artifact
// relative to the run directory together with its FNV-1a content digest;
// records carry no timestamps so identical runs produce identical manifests.
class RunDirectory {
 public:
  // Creates the directory and truncates any existing manifest.
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::string& relative) const { return root_ / relative; }
  std::filesystem::path manifest_path() const { return root_ / "manifest.jsonl"; }

  // Appends {"kind":..., plus fields} as one line.
  void record(const std::string& kind, const std::map<std::string, std::string>& fields);
  // Records an artifact already written under the run directory.
  void record_file(const std::string& kind, const std::string& relative,
                   std::map<std::string, std::string> fields = {});

 private:
  std::filesystem::path root_;
};

std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace focal::harness
