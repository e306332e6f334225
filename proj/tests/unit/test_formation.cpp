#include <doctest.h>

#include "fdml/error.hpp"
#include "fdml/formation.hpp"
#include "temp_dir.hpp"
#include "fdml/text_io.hpp"

using namespace fdml;

TEST_CASE("group labels and indices are a fixed bijection") {
  for (int i = 1; i <= kGroupCount; ++i) {
    const auto g = FormationGroup::from_index(i);
    CHECK(g.index() == i);
    CHECK(FormationGroup::from_label(g.label()) == g);
  }
  CHECK(FormationGroup::from_index(1).label() == "5-4-1");
  CHECK(FormationGroup::from_index(6).label() == "3-4-3");
  CHECK_THROWS_AS(FormationGroup::from_index(0), Error);
  CHECK_THROWS_AS(FormationGroup::from_index(7), Error);
  CHECK_FALSE(FormationGroup::from_label("4-5-1").has_value());
}

TEST_CASE("formation lines must be 2-4 positive numbers summing to ten") {
  CHECK(parse_formation_lines("4-2-3-1") == std::vector<int>{4, 2, 3, 1});
  CHECK(parse_formation_lines("4-4-2").has_value());
  CHECK_FALSE(parse_formation_lines("4-3-3-1").has_value());  // 11 outfielders
  CHECK_FALSE(parse_formation_lines("10").has_value());
  CHECK_FALSE(parse_formation_lines("4-0-6").has_value());
  CHECK_FALSE(parse_formation_lines("1-2-3-2-2").has_value());
  CHECK_FALSE(parse_formation_lines("4--4-2").has_value());
  CHECK_FALSE(parse_formation_lines("a-b").has_value());
}

TEST_CASE("default mapping") {
  const auto m = FormationMapping::defaults();
  CHECK(m.group("4-3-1-2").label() == "4-3-3");
  CHECK(m.group("4-4-2").label() == "4-4-2");
  for (auto label : kGroupLabels) CHECK(m.group(label).label() == label);
  CHECK(m.entries().size() == 28);
  for (const auto& [raw, group] : m.entries()) CHECK_MESSAGE(parse_formation_lines(raw).has_value(), raw);

  try {
    m.group("9-0-1");
    FAIL("expected an unmapped-formation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unmapped_formation);
    CHECK(std::string(e.what()).find("9-0-1") != std::string::npos);
  }
}

TEST_CASE("shipped mapping file equals the embedded default") {
  const auto file = FormationMapping::from_file(std::filesystem::path(FDML_SOURCE_DIR) / "data" / "formation_map.txt");
  CHECK(file.entries() == FormationMapping::defaults().entries());
}

TEST_CASE("mapping text round-trips and can be replaced") {
  const auto m = FormationMapping::defaults();
  CHECK(FormationMapping::from_text(m.to_text()).entries() == m.entries());

  const auto custom = FormationMapping::from_text("# custom\n4-4-2, 3-5-2\n3-4-1-2,4-4-2\n");
  CHECK(custom.entries().size() == 2);
  CHECK(custom.group("4-4-2").label() == "3-5-2");
  CHECK_FALSE(custom.contains("4-3-3"));
  CHECK_THROWS_AS(FormationMapping::from_text("4-4-2,9-9-9\n"), Error);
  CHECK_THROWS_AS(FormationMapping::from_text("4-4-2\n"), Error);
}
