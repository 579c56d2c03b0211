#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace beltrami {

/// Flat `key = value` text with optional one-level `[section]` headers.
///
/// Values may be double-quoted (with \" and \\ escapes) or bare. Keys inside a
/// section are stored as "section.key". Lines starting with '#' are comments.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  std::optional<double> get_real(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

  /// Quotes a value for writing back (always double-quoted).
  static std::string quote(std::string_view value);

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace beltrami
