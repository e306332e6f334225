#include "fdml/formation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fdml/error.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

namespace {

// Mirrors data/formation_map.txt.
constexpr std::pair<std::string_view, int> kDefaultMapping[] = {
    {"5-4-1", 1},   {"5-3-2", 1},   {"5-2-3", 1},   {"5-2-2-1", 1}, {"5-3-1-1", 1},
    {"4-4-2", 2},   {"4-4-1-1", 2}, {"4-2-2-2", 2}, {"4-1-3-2", 2},
    {"3-5-2", 3},   {"3-5-1-1", 3}, {"3-1-4-2", 3}, {"3-4-1-2", 3}, {"3-2-3-2", 3},
    {"4-2-3-1", 4}, {"4-1-4-1", 4}, {"4-5-1", 4},   {"4-2-1-3", 4},
    {"4-3-3", 5},   {"4-3-1-2", 5}, {"4-1-2-3", 5}, {"4-3-2-1", 5}, {"4-2-4", 5},
    {"3-4-3", 6},   {"3-4-2-1", 6}, {"3-3-3-1", 6}, {"3-2-4-1", 6}, {"3-3-1-3", 6},
};

}  // namespace

FormationGroup FormationGroup::from_index(int index) {
  if (index < 1 || index > kGroupCount)
    throw Error(ErrorCode::validation, "formation group index " + std::to_string(index) + " outside 1.." +
                                           std::to_string(kGroupCount));
  return FormationGroup(index);
}

std::optional<FormationGroup> FormationGroup::from_label(std::string_view label) {
  for (std::size_t i = 0; i < kGroupLabels.size(); ++i)
    if (kGroupLabels[i] == label) return FormationGroup(static_cast<int>(i) + 1);
  return std::nullopt;
}

std::optional<std::vector<int>> parse_formation_lines(std::string_view raw) {
  std::vector<int> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const auto dash = raw.find('-', start);
    const auto part = raw.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start);
    auto v = parse_int(part);
    if (!v || *v <= 0 || *v > 10) return std::nullopt;
    lines.push_back(static_cast<int>(*v));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  if (lines.size() < 2 || lines.size() > 4) return std::nullopt;
  int sum = 0;
  for (int l : lines) sum += l;
  if (sum != 10) return std::nullopt;
  return lines;
}

FormationMapping FormationMapping::defaults() {
  FormationMapping m;
  for (const auto& [raw, idx] : kDefaultMapping) m.set(std::string(raw), FormationGroup::from_index(idx));
  return m;
}

FormationMapping FormationMapping::from_text(std::string_view text) {
  FormationMapping m;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string raw, group, extra;
    if (!(fields >> raw)) continue;
    if (!(fields >> group) || (fields >> extra))
      throw Error(ErrorCode::config, "formation mapping line " + std::to_string(line_no) +
                                         ": expected two columns (raw group)");
    auto g = FormationGroup::from_label(group);
    if (!g)
      throw Error(ErrorCode::config, "formation mapping line " + std::to_string(line_no) + ": unknown group '" +
                                         group + "'");
    m.set(raw, *g);
  }
  return m;
}

FormationMapping FormationMapping::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open formation mapping '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

FormationGroup FormationMapping::group(std::string_view raw) const {
  auto it = entries_.find(raw);
  if (it == entries_.end())
    throw Error(ErrorCode::unmapped_formation, "unmapped formation '" + std::string(raw) + "'");
  return it->second;
}

bool FormationMapping::contains(std::string_view raw) const { return entries_.find(raw) != entries_.end(); }

void FormationMapping::set(std::string raw, FormationGroup group) { entries_.insert_or_assign(std::move(raw), group); }

std::string FormationMapping::to_text() const {
  std::string out;
  for (const auto& [raw, g] : entries_) {
    out += raw;
    out += ' ';
    out += g.label();
    out += '\n';
  }
  return out;
}

}  // namespace fdml
