#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lbsim/layout.hpp"

namespace lbsim {

struct FetStatement {
  Polarity polarity = Polarity::NFET;
  std::uint64_t id = 0;
  std::uint64_t source = 0;
  std::uint64_t drain = 0;
  std::uint64_t gate = 0;
  std::uint64_t length = 0;
  std::uint64_t width = 0;
  std::uint64_t time = 0;
  friend bool operator==(const FetStatement&, const FetStatement&) = default;
};

struct ContactStatement {
  std::uint64_t id = 0;
  std::uint64_t node_a = 0;
  std::uint64_t node_b = 0;
  std::uint64_t time = 0;
  friend bool operator==(const ContactStatement&, const ContactStatement&) = default;
};

using NetlistStatement = std::variant<FetStatement, ContactStatement>;

std::uint64_t statement_time(const NetlistStatement& s);

/// Thrown by parse_statement; `column` is 1-based.
class NetlistParseError : public std::runtime_error {
 public:
  NetlistParseError(const std::string& what, std::size_t column)
      : std::runtime_error("column " + std::to_string(column) + ": " + what),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// `NFET 3: S - 12, D - 7, G - 5, L - 2, W - 6, Time = 148`
/// `Contact 9: Node 12 == Node 4, Time = 201`
std::string format_statement(const NetlistStatement& s);
NetlistStatement parse_statement(std::string_view line);

/// One statement per line, newline-terminated.
std::string format_netlist_file(const std::vector<NetlistStatement>& statements);
/// Parses a `.net` file; errors carry the 1-based line number in the message.
std::vector<NetlistStatement> parse_netlist_file(std::string_view text);

}  // namespace lbsim
