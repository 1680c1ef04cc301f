#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace thinfilm;

namespace {

Model small_model() {
  Model m;
  const auto x = m.add_variable("x", 0, 1, VarKind::Binary);
  const auto y = m.add_variable("y", -2.5, 3.0 / 7.0);
  const auto z = m.add_variable("z", 1.0, 1.0);
  m.objective().linear = {{x, 1.0}, {y, -0.1}};
  m.objective().constant = 0.75;
  m.add_constraint({"c1", {{x, 1.0}, {y, 2.0 / 3.0}}, {}, Sense::LessEqual, 1e-17});
  m.add_constraint({"c2", {{y, -1.0}}, {{x, y, 1.0}, {z, z, -3.25e-5}}, Sense::GreaterEqual, -4.0});
  m.add_constraint({"c3", {}, {{x, y, 2.0}}, Sense::Equal, 0.0});
  m.header().push_back("test model");
  return m;
}

}  // namespace

TEST(Model, DuplicateAndUnknownVariables) {
  Model m;
  m.add_variable("a", 0, 1);
  EXPECT_THROW(m.add_variable("a", 0, 1), InvalidArgument);
  EXPECT_THROW(m.add_constraint({"bad", {{7, 1.0}}, {}, Sense::Equal, 0.0}), InvalidArgument);
  EXPECT_TRUE(m.find("a"));
  EXPECT_FALSE(m.find("b"));
}

TEST(Model, EmptyModelIsHeaderAndEnd) {
  Model m;
  EXPECT_EQ(write_lp(m), "End\n");
  m.header().push_back("nothing here");
  EXPECT_EQ(write_lp(m), "\\ nothing here\nEnd\n");
}

TEST(Model, LpTextLayout) {
  const auto text = write_lp(small_model());
  EXPECT_NE(text.find("Maximize\n obj: x - 0.10000000000000001 y + 0.75\n"), std::string::npos) << text;
  EXPECT_NE(text.find("c2: - y + [ x * y - " + lp::number(3.25e-5) + " z ^ 2 ] >= -4"), std::string::npos) << text;
  EXPECT_NE(text.find(" z = 1\n"), std::string::npos);
  EXPECT_NE(text.find("Binaries\n x\n"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 4), "End\n");
}

TEST(Model, RoundTrip) {
  const auto m = small_model();
  const auto text = write_lp(m);
  const auto back = parse_lp(text);
  EXPECT_TRUE(structurally_equal(m, back, 1e-15));
  EXPECT_EQ(write_lp(back), text);
  EXPECT_EQ(back.header(), m.header());
}

TEST(Model, ParseErrors) {
  EXPECT_THROW(parse_lp("Minimize\n obj: x\nEnd\n"), ParseError);
  EXPECT_THROW(parse_lp("Maximize\n obj: x\nSubject To\n x >= 1\nEnd\n"), ParseError);
  EXPECT_THROW(parse_lp("Bounds\n 0 <= x 1\nEnd\n"), ParseError);
}

TEST(Model, ExportAndImportFile) {
  const auto dir = std::filesystem::temp_directory_path() / "thinfilm_model_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "m.lp";
  export_lp(small_model(), path);
  EXPECT_FALSE(std::filesystem::exists(dir / "m.lp.tmp"));
  EXPECT_TRUE(structurally_equal(import_lp(path), small_model(), 1e-15));
  EXPECT_THROW(export_lp(small_model(), dir / "missing" / "m.lp"), IoError);
  EXPECT_THROW(import_lp(dir / "nope.lp"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Model, ViolationsAndObjective) {
  const auto m = small_model();
  std::vector<double> ok{0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(objective_value(m, ok), 0.75);
  EXPECT_TRUE(violations(m, ok, 1e-9).empty());
  std::vector<double> bad{0.5, 0.4, 1.0};
  const auto v = violations(m, bad, 1e-9);
  EXPECT_FALSE(v.empty());
}

TEST(Model, ValidateRejectsInfiniteContinuousBounds) {
  Model m;
  m.add_variable("a", 0, std::numeric_limits<double>::infinity());
  EXPECT_THROW(m.validate(), InvalidArgument);
}

TEST(Model, LongLinesWrapAndStillParse) {
  Model m;
  Constraint c{"long", {}, {}, Sense::Equal, 1.0};
  for (int i = 0; i < 200; ++i) c.linear.push_back({m.add_variable("var_" + std::to_string(i), 0, 1), 1.0 / (i + 3)});
  m.add_constraint(c);
  const auto text = write_lp(m);
  std::size_t longest = 0, start = 0;
  for (std::size_t i = 0; i < text.size(); ++i)
    if (text[i] == '\n') {
      longest = std::max(longest, i - start);
      start = i + 1;
    }
  EXPECT_LE(longest, 255u);
  EXPECT_TRUE(structurally_equal(parse_lp(text), m, 0.0));
}
