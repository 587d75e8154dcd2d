#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "flat_toml.hpp"
#include "s2lab/field_io.hpp"
#include "support.hpp"

using namespace s2lab;

TEST(FormatDouble, RoundTrips)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = g(rng);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(BinaryField, RoundTripIsBitExact)
{
  std::mt19937_64 rng(2);
  const auto f = s2test::random_unit_field(137, rng);
  std::stringstream ss;
  write_field_binary(ss, f);
  EXPECT_EQ(ss.str().size(), 16u + 137u * 24u);
  EXPECT_EQ(ss.str().substr(0, 8), "S2FIELD1");
  EXPECT_EQ(read_field_binary(ss), f);
}

TEST(BinaryField, LittleEndianHeader)
{
  std::stringstream ss;
  write_field_binary(ss, SphereField(258, e3));
  const std::string s = ss.str();
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 2u);
  EXPECT_EQ(static_cast<unsigned char>(s[9]), 1u);
  for (int i = 10; i < 16; ++i) EXPECT_EQ(s[i], 0);
  // 1.0 = 0x3FF0000000000000, stored low byte first.
  EXPECT_EQ(static_cast<unsigned char>(s[16 + 16 + 7]), 0x3Fu);
  EXPECT_EQ(static_cast<unsigned char>(s[16 + 16 + 6]), 0xF0u);
}

TEST(BinaryField, RejectsBadInput)
{
  std::stringstream bad("NOTAFIELD-------");
  EXPECT_THROW(read_field_binary(bad), ValidationError);
  std::stringstream ss;
  write_field_binary(ss, SphereField(4, e3));
  std::stringstream truncated(ss.str().substr(0, 40));
  EXPECT_THROW(read_field_binary(truncated), ValidationError);
  EXPECT_THROW(load_field_binary("/nonexistent/field.bin"), ValidationError);
}

TEST(BinaryField, FileRoundTrip)
{
  const auto path = (std::filesystem::temp_directory_path() / "s2lab_io_test.bin").string();
  std::mt19937_64 rng(3);
  const auto f = s2test::random_unit_field(20, rng);
  save_field_binary(path, f);
  EXPECT_EQ(load_field_binary(path), f);
  std::remove(path.c_str());
}

TEST(CsvField, LayoutAndPrecision)
{
  const Mesh m = build_rectangle_mesh(3, 3, 1.0, 1.0);
  SphereField f(m.size(), e3);
  f[5] = normalized(Vec3{1.0, 2.0, 3.0});
  std::ostringstream os;
  write_field_csv(os, m, f);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,y,m1,m2,m3");
  std::vector<std::string> rows;
  while (std::getline(is, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), m.size());
  std::istringstream row(rows[5]);
  std::string cell;
  std::vector<double> vals;
  while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
  ASSERT_EQ(vals.size(), 5u);
  EXPECT_EQ(vals[2], f[5][0]);
  EXPECT_EQ(vals[3], f[5][1]);
  EXPECT_EQ(vals[4], f[5][2]);
  EXPECT_THROW(write_field_csv(os, m, SphereField(3, e3)), ValidationError);
}

TEST(CsvPhase, Layout)
{
  const Mesh m = build_disk_mesh(3, 8, 1.0);
  std::ostringstream os;
  write_phase_csv(os, m, PhaseField(m.size(), 0.25));
  EXPECT_EQ(os.str().substr(0, 9), "x,y,phi\n0");
}

TEST(FlatToml, SectionsValuesAndComments)
{
  const auto t = toml::parse(R"(
# run config
[domain]
shape = "disk"   # trailing comment
R = 1.5
nr = 48

[params]
kappa2 = 5
gamma = 0.1
[solve]
label = "a # not a comment"
quiet = true
[sweep]
kappas = [0.5, 1, 2_0]
empty = []
)");
  EXPECT_EQ(*t.string("domain.shape"), "disk");
  EXPECT_DOUBLE_EQ(*t.number("domain.R"), 1.5);
  EXPECT_DOUBLE_EQ(*t.number("domain.nr"), 48.0);
  EXPECT_DOUBLE_EQ(*t.number("params.kappa2"), 5.0);
  EXPECT_EQ(*t.string("solve.label"), "a # not a comment");
  EXPECT_TRUE(*t.boolean("solve.quiet"));
  EXPECT_EQ(*t.numbers("sweep.kappas"), (std::vector<double>{0.5, 1.0, 20.0}));
  EXPECT_TRUE(t.numbers("sweep.empty")->empty());
  EXPECT_FALSE(t.number("params.missing").has_value());
  EXPECT_TRUE(t.contains("domain.R"));
}

TEST(FlatToml, Errors)
{
  EXPECT_THROW(toml::parse("[domain\nR = 1"), ValidationError);
  EXPECT_THROW(toml::parse("R 1"), ValidationError);
  EXPECT_THROW(toml::parse("R = 1\nR = 2"), ValidationError);
  EXPECT_THROW(toml::parse("R ="), ValidationError);
  const auto t = toml::parse("a = \"x\"\nb = 1.5x\nc = yes\nd = 3");
  EXPECT_THROW((void)t.number("a"), ValidationError);
  EXPECT_THROW((void)t.number("b"), ValidationError);
  EXPECT_THROW((void)t.boolean("c"), ValidationError);
  EXPECT_THROW((void)t.string("d"), ValidationError);
  EXPECT_THROW((void)t.numbers("d"), ValidationError);
  EXPECT_THROW(toml::parse_file("/nonexistent.toml"), ValidationError);
}
