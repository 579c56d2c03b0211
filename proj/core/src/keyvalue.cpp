#include "beltrami/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "beltrami/errors.hpp"

namespace beltrami {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view raw, int line) {
  std::string out;
  std::size_t i = 1;
  for (; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\' && i + 1 < raw.size()) {
      out.push_back(raw[++i]);
    } else if (c == '"') {
      break;
    } else {
      out.push_back(c);
    }
  }
  if (i >= raw.size()) throw FormatError("unterminated string on line " + std::to_string(line));
  auto rest = trim(raw.substr(i + 1));
  if (!rest.empty() && rest.front() != '#')
    throw FormatError("trailing characters after string on line " + std::to_string(line));
  return out;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("malformed section on line " + std::to_string(line_no));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("expected 'key = value' on line " + std::to_string(line_no));
    auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw FormatError("empty key on line " + std::to_string(line_no));
    auto raw = trim(line.substr(eq + 1));
    std::string value;
    if (!raw.empty() && raw.front() == '"') {
      value = unquote(raw, line_no);
    } else {
      auto hash = raw.find('#');
      value = std::string(trim(raw.substr(0, hash)));
    }
    file.entries_[section.empty() ? key : section + "." + key] = std::move(value);
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw FormatError("missing key '" + key + "'");
  return *v;
}

std::optional<double> KeyValueFile::get_real(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size())
    throw FormatError("key '" + key + "' is not a real number: " + *v);
  return out;
}

std::string KeyValueFile::quote(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace beltrami
