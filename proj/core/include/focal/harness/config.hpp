#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace focal::harness {

// Line-based configuration: UTF-8, one key=value per line, '#' starts a comment,
// surrounding whitespace is trimmed. Later assignments override earlier ones.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& file = "<config>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  // Applies "key=value"; throws std::invalid_argument when '=' is missing.
  void set_assignment(const std::string& assignment);
  void merge(const Config& overrides);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::uint64_t digest() const;
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace focal::harness
