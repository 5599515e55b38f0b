#include <gtest/gtest.h>

#include <sstream>

#include "binreg/error.hpp"
#include "binreg/io.hpp"
#include "binreg/verify.hpp"

namespace binreg {
namespace {

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST(Csv, PredictorsInHeaderOrderAroundY) {
  const CsvTable t = parse("b,y,a\n1,0,10\n2,1,20\n3,1.0,30\n");
  ASSERT_EQ(t.predictor_names, (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(t.data.d(), 2u);
  EXPECT_EQ(t.data.x()(2, 1), 30.0);
  EXPECT_EQ(t.data.y(), (std::vector<int>{0, 1, 1}));
}

TEST(Csv, ToleratesBlankLinesSpacesAndCrlf) {
  const CsvTable t = parse("\n x , y \r\n 1.5 , 0\r\n\n-2e3,1\r\n");
  EXPECT_EQ(t.data.n(), 2u);
  EXPECT_EQ(t.data.x()(1, 0), -2000.0);
}

TEST(Csv, LabelsMustBeExactlyZeroOrOne) {
  EXPECT_THROW(parse("x,y\n1,0\n2,0.5\n"), NonBinaryLabel);
  EXPECT_THROW(parse("x,y\n1,0\n2,2\n"), NonBinaryLabel);
  EXPECT_NO_THROW(parse("x,y\n1,0.0\n2,1.0\n"));
}

TEST(Csv, NonNumericCellReportsLineAndColumn) {
  EXPECT_NE(error_of("x,z,y\n1,2,0\n3,abc,1\n").find("line 3, column 2"), std::string::npos);
}

TEST(Csv, NonFiniteCellRejected) {
  EXPECT_THROW(parse("x,y\ninf,0\n2,1\n"), NonFiniteValue);
  EXPECT_THROW(parse("x,y\nnan,0\n2,1\n"), NonFiniteValue);
}

TEST(Csv, StructuralErrors) {
  EXPECT_THROW(parse(""), CsvError);
  EXPECT_THROW(parse("a,b\n1,2\n"), CsvError);        // no y
  EXPECT_THROW(parse("y\n1\n0\n"), CsvError);         // no predictors
  EXPECT_THROW(parse("x,y,y\n1,0,1\n"), CsvError);    // two y columns
  EXPECT_THROW(parse("x,y\n1,0\n2\n"), CsvError);     // short row
  EXPECT_THROW(parse("x,y\n"), CsvError);             // no data
  EXPECT_THROW(parse("x,y\n1,0\n,1\n"), CsvError);    // empty cell
}

TEST(Csv, EmptyGroupPropagates) {
  EXPECT_THROW(parse("x,y\n1,1\n2,1\n"), EmptyGroup);
}

TEST(Csv, MissingFile) {
  EXPECT_THROW(read_csv("/nonexistent/binreg.csv"), CsvError);
}

TEST(Csv, WriteThenReadRoundTripsExactly) {
  const Dataset ds = gen_overlapping(25, 3, 11);
  std::ostringstream out;
  write_csv(out, ds);
  const CsvTable back = parse(out.str());
  EXPECT_EQ(back.predictor_names, (std::vector<std::string>{"x1", "x2", "x3"}));
  EXPECT_EQ(back.data.x(), ds.x());
  EXPECT_EQ(back.data.y(), ds.y());
}

}  // namespace
}  // namespace binreg
