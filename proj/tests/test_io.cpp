#include "emdq/io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace emdq;
using namespace emdq::testing;

namespace {

ParseErrorKind parse_kind(const std::string& text, std::optional<int> dim = std::nullopt) {
  std::istringstream in(text);
  try {
    read_matches(in, dim);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return ParseErrorKind::io;
}

}  // namespace

TEST(ReadMatches, Basic2d) {
  std::istringstream in("2,3,px\n1,2,3,4\n5,6,7,8\n\n-1.5,2e3,0,0\n");
  const MatchFile f = read_matches(in);
  EXPECT_EQ(f.units, "px");
  EXPECT_FALSE(f.gt.has_value());
  ASSERT_EQ(f.matches.size(), 3u);
  EXPECT_EQ(f.matches.dim, 2);
  EXPECT_EQ(f.matches.x[1], Vec3(5, 6, 0));
  EXPECT_EQ(f.matches.y[1], Vec3(7, 8, 0));
  EXPECT_EQ(f.matches.x[2], Vec3(-1.5, 2000, 0));
}

TEST(ReadMatches, NamedHeaderGtAndCrlf) {
  std::istringstream in("dim,n,units\r\n3,2,m\r\n1,2,3,4,5,6,1\r\n0,0,0,0,0,0,0\r\n");
  const MatchFile f = read_matches(in, 3);
  EXPECT_EQ(f.units, "m");
  ASSERT_TRUE(f.gt.has_value());
  EXPECT_EQ(*f.gt, (std::vector<bool>{true, false}));
  EXPECT_EQ(f.matches.y[0], Vec3(4, 5, 6));
}

TEST(ReadMatches, UnitsOptional) {
  std::istringstream in("2,1\n1,2,3,4\n");
  EXPECT_EQ(read_matches(in).units, "");
}

TEST(ReadMatches, ErrorKinds) {
  EXPECT_EQ(parse_kind(""), ParseErrorKind::truncated);
  EXPECT_EQ(parse_kind("two,3,px\n"), ParseErrorKind::bad_header);
  EXPECT_EQ(parse_kind("4,1,px\n1,2,3,4\n"), ParseErrorKind::bad_header);
  EXPECT_EQ(parse_kind("2,0,px\n"), ParseErrorKind::bad_header);
  EXPECT_EQ(parse_kind("2,1,px\n1,2,3,4\n", 3), ParseErrorKind::dimension_mismatch);
  EXPECT_EQ(parse_kind("2,1,px\n1,2,3\n"), ParseErrorKind::dimension_mismatch);
  EXPECT_EQ(parse_kind("2,1,px\n1,2,3,4,5,6\n"), ParseErrorKind::dimension_mismatch);
  EXPECT_EQ(parse_kind("2,1,px\n1,b,3,4\n"), ParseErrorKind::non_numeric);
  EXPECT_EQ(parse_kind("2,1,px\n1,2,3,nan\n"), ParseErrorKind::non_numeric);
  EXPECT_EQ(parse_kind("2,1,px\n1,2,3,4,2\n"), ParseErrorKind::non_numeric);
  EXPECT_EQ(parse_kind("2,2,px\n1,2,3,4\n"), ParseErrorKind::truncated);
  EXPECT_EQ(parse_kind("2,1,px\n1,2,3,4\n5,6,7,8\n"), ParseErrorKind::extra_rows);
  EXPECT_EQ(parse_kind("2,2,px\n1,2,3,4,1\n1,2,3,4\n"), ParseErrorKind::inconsistent_gt);
}

TEST(ReadMatches, ErrorCarriesLineNumber) {
  std::istringstream in("2,2,px\n1,2,3,4\n1,x,3,4\n");
  try {
    read_matches(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(WriteMatches, RoundTripIsExact) {
  MatchSet m = rigid_scene(50, 3, rot_axis(0.7, Vec3(1, 2, 3)), Vec3(0.1, 0.2, 0.3), 1.0 / 3.0, 1);
  std::vector<bool> gt(50);
  for (std::size_t i = 0; i < 50; ++i) gt[i] = i % 3 == 0;
  std::stringstream ss;
  write_matches(ss, m, "m", &gt);
  const MatchFile f = read_matches(ss);
  EXPECT_EQ(f.units, "m");
  EXPECT_EQ(f.matches.x, m.x);
  EXPECT_EQ(f.matches.y, m.y);
  EXPECT_EQ(*f.gt, gt);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(20.0), "20");
  EXPECT_EQ(format_double(-0.1), "-0.1");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Labels, RoundTripAndHeader) {
  LabelResult l;
  l.inlier = {true, false, true};
  l.posterior = {0.99, 1e-30, 0.5000001};
  l.residual = {1.25, std::numeric_limits<double>::infinity(), 0.0};
  std::stringstream ss;
  write_labels(ss, l);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "index,inlier,posterior,residual");
  const LabelResult back = read_labels(ss);
  EXPECT_EQ(back.inlier, l.inlier);
  EXPECT_EQ(back.posterior, l.posterior);
  EXPECT_EQ(back.residual, l.residual);
}

TEST(Labels, Malformed) {
  std::istringstream bad_header("i,inlier,p,r\n");
  EXPECT_THROW(read_labels(bad_header), ParseError);
  std::istringstream bad_order("index,inlier,posterior,residual\n1,1,0.5,0\n");
  EXPECT_THROW(read_labels(bad_order), ParseError);
  std::istringstream bad_flag("index,inlier,posterior,residual\n0,2,0.5,0\n");
  EXPECT_THROW(read_labels(bad_flag), ParseError);
}

TEST(Field, CsvLayout) {
  std::vector<FieldSample> s(2);
  s[0] = {Vec3(0, 0, 0), Vec3(1.5, -2, 0), 0.75, true};
  s[1] = {Vec3(50, 0, 0), Vec3(50, 0, 0), 0.0, false};
  std::stringstream ss2;
  write_field(ss2, s, 2);
  EXPECT_EQ(ss2.str(), "qx,qy,dx,dy,support,valid\n0,0,1.5,-2,0.75,1\n50,0,50,0,0,0\n");
  std::stringstream ss3;
  write_field(ss3, std::span<const FieldSample>(s.data(), 1), 3);
  EXPECT_EQ(ss3.str(), "qx,qy,qz,dx,dy,dz,support,valid\n0,0,0,1.5,-2,0,0.75,1\n");
}

TEST(Files, SaveLoadAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "emdq_test_io";
  std::filesystem::create_directories(dir);
  const MatchSet m = rigid_scene(10, 2, rot_z(0.2), Vec3(1, 1, 0), 1.0, 2);
  save_matches(dir / "m.csv", m, "px");
  EXPECT_EQ(load_matches(dir / "m.csv").matches.x, m.x);
  try {
    load_matches(dir / "missing.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::io);
  }
  std::filesystem::remove_all(dir);
}
