#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grasp::io {

struct IniEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;  // 1-based
};

/// Minimal INI reader for BrainVision header and marker files. Keys keep their
/// file order within a section; ';' starts a comment line; text before the first
/// section header (the format banner) is ignored.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text) {
    IniDocument doc;
    std::string current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string line(text.substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (line[first] == ';') continue;
      if (line[first] == '[') {
        const auto close = line.find(']', first);
        current = line.substr(first + 1, close == std::string::npos ? std::string::npos : close - first - 1);
        doc.sections_[current];
        continue;
      }
      if (current.empty()) continue;
      const auto eq = line.find('=');
      IniEntry entry;
      entry.line = line_no;
      if (eq == std::string::npos) {
        entry.key = trim(line);
      } else {
        entry.key = trim(line.substr(0, eq));
        entry.value = line.substr(eq + 1);
      }
      doc.sections_[current].push_back(std::move(entry));
    }
    return doc;
  }

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

  const std::vector<IniEntry>& section(const std::string& name) const {
    static const std::vector<IniEntry> empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
  }

  const IniEntry* find(const std::string& section_name, const std::string& key) const {
    for (const auto& e : section(section_name))
      if (e.key == key) return &e;
    return nullptr;
  }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

 private:
  std::map<std::string, std::vector<IniEntry>> sections_;
};

}  // namespace grasp::io
