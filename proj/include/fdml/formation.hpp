#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdml {

// The six canonical formation groups, ordered from most defensive to most offensive.
inline constexpr std::array<std::string_view, 6> kGroupLabels{"5-4-1", "4-4-2",   "3-5-2",
                                                              "4-2-3-1", "4-3-3", "3-4-3"};
inline constexpr int kGroupCount = static_cast<int>(kGroupLabels.size());

class FormationGroup {
 public:
  // 1-based index into kGroupLabels; throws on out-of-range.
  static FormationGroup from_index(int index);
  static std::optional<FormationGroup> from_label(std::string_view label);

  int index() const noexcept { return index_; }
  std::string_view label() const noexcept { return kGroupLabels[static_cast<std::size_t>(index_ - 1)]; }

  friend bool operator==(FormationGroup, FormationGroup) = default;
  friend auto operator<=>(FormationGroup, FormationGroup) = default;

 private:
  explicit FormationGroup(int index) : index_(index) {}
  int index_;
};

// Splits "4-2-3-1" into its lines. Returns nullopt unless there are 2..4
// positive integers summing to ten outfielders.
std::optional<std::vector<int>> parse_formation_lines(std::string_view raw);

// Raw formation string -> group. Ships with a default table; fully replaceable
// from a two-column text file (raw, group) with `#` comments.
class FormationMapping {
 public:
  static FormationMapping defaults();
  static FormationMapping from_file(const std::filesystem::path& path);
  static FormationMapping from_text(std::string_view text);

  // Throws Error(unmapped_formation) naming the string.
  FormationGroup group(std::string_view raw) const;
  bool contains(std::string_view raw) const;

  void set(std::string raw, FormationGroup group);
  const std::map<std::string, FormationGroup, std::less<>>& entries() const noexcept { return entries_; }

  // Same format accepted by from_text.
  std::string to_text() const;

 private:
  std::map<std::string, FormationGroup, std::less<>> entries_;
};

}  // namespace fdml
