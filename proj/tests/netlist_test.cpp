#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "lbsim/netlist.hpp"
#include "test_support.hpp"

namespace lbsim {
namespace {

const std::regex kFetLine(
    R"(^[NP]FET \d+: S - \d+, D - \d+, G - \d+, L - \d+, W - \d+, Time = \d+$)");
const std::regex kContactLine(R"(^Contact \d+: Node \d+ == Node \d+, Time = \d+$)");

TEST(Format, GrammarExamples) {
  EXPECT_EQ(format_statement(FetStatement{Polarity::NFET, 3, 12, 7, 5, 2, 6, 148}),
            "NFET 3: S - 12, D - 7, G - 5, L - 2, W - 6, Time = 148");
  EXPECT_EQ(format_statement(ContactStatement{9, 12, 4, 201}),
            "Contact 9: Node 12 == Node 4, Time = 201");
}

TEST(Format, GoldenFile) {
  const std::string golden = test::read_file(std::string(LBSIM_GOLDEN_DIR) + "/statements.net");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(format_netlist_file(test::golden_statements()), golden);
  EXPECT_EQ(parse_netlist_file(golden), test::golden_statements());
}

TEST(Parse, RejectsMetavariableAndMalformedLines) {
  EXPECT_THROW(parse_statement("FET 1: S - 1, D - 2, G - 3, L - 1, W - 1, Time = 0"),
               NetlistParseError);
  EXPECT_THROW(parse_statement("NFET 1: S - 1, D - 2, G - 3, L - 1, W - 1, Time = "),
               NetlistParseError);
  EXPECT_THROW(parse_statement("NFET 1: S - 1, D - 2, G - 3, L - 1, W - 1, Time = 4 "),
               NetlistParseError);
  EXPECT_THROW(parse_statement("NFET -1: S - 1, D - 2, G - 3, L - 1, W - 1, Time = 4"),
               NetlistParseError);
  EXPECT_THROW(parse_statement("Contact 1: Node 2 = Node 3, Time = 4"), NetlistParseError);
  EXPECT_THROW(parse_statement("contact 1: Node 2 == Node 3, Time = 4"), NetlistParseError);
  EXPECT_THROW(parse_statement("Contact 99999999999999999999: Node 2 == Node 3, Time = 4"),
               NetlistParseError);
}

TEST(Parse, ErrorColumnPointsAtProblem) {
  try {
    parse_statement("Contact 1: Node 2 = Node 3, Time = 4");
    FAIL();
  } catch (const NetlistParseError& e) {
    EXPECT_EQ(e.column(), 18u);
  }
}

TEST(Parse, FileErrorsNameTheLine) {
  try {
    parse_netlist_file("Contact 1: Node 2 == Node 3, Time = 4\nbogus\n");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(RoundTrip, TenThousandRandomStatements) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 10000; ++i) {
    const NetlistStatement s = test::random_statement(rng);
    const std::string line = format_statement(s);
    const bool is_fet = std::holds_alternative<FetStatement>(s);
    ASSERT_TRUE(std::regex_match(line, is_fet ? kFetLine : kContactLine)) << line;
    ASSERT_EQ(parse_statement(line), s) << line;
  }
}

TEST(RoundTrip, FileOfRandomStatements) {
  std::mt19937_64 rng(7);
  std::vector<NetlistStatement> all;
  for (int i = 0; i < 500; ++i) all.push_back(test::random_statement(rng));
  EXPECT_EQ(parse_netlist_file(format_netlist_file(all)), all);
}

}  // namespace
}  // namespace lbsim
