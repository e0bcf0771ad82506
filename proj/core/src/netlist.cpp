#include "lbsim/netlist.hpp"

#include <charconv>

namespace lbsim {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void expect(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit)
      throw NetlistParseError("expected '" + std::string(lit) + "'", pos_ + 1);
    pos_ += lit.size();
  }

  bool accept(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  std::uint64_t number() {
    if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
      throw NetlistParseError("expected non-negative integer", pos_ + 1);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) throw NetlistParseError("integer out of range", pos_ + 1);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  void finish() {
    if (pos_ != text_.size()) throw NetlistParseError("trailing characters", pos_ + 1);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t statement_time(const NetlistStatement& s) {
  return std::visit([](const auto& v) { return v.time; }, s);
}

std::string format_statement(const NetlistStatement& s) {
  if (const auto* f = std::get_if<FetStatement>(&s)) {
    return std::string(f->polarity == Polarity::PFET ? "PFET " : "NFET ") +
           std::to_string(f->id) + ": S - " + std::to_string(f->source) +
           ", D - " + std::to_string(f->drain) + ", G - " + std::to_string(f->gate) +
           ", L - " + std::to_string(f->length) + ", W - " + std::to_string(f->width) +
           ", Time = " + std::to_string(f->time);
  }
  const auto& c = std::get<ContactStatement>(s);
  return "Contact " + std::to_string(c.id) + ": Node " + std::to_string(c.node_a) +
         " == Node " + std::to_string(c.node_b) + ", Time = " + std::to_string(c.time);
}

NetlistStatement parse_statement(std::string_view line) {
  Cursor in(line);
  if (in.accept("Contact ")) {
    ContactStatement c;
    c.id = in.number();
    in.expect(": Node ");
    c.node_a = in.number();
    in.expect(" == Node ");
    c.node_b = in.number();
    in.expect(", Time = ");
    c.time = in.number();
    in.finish();
    return c;
  }
  FetStatement f;
  if (in.accept("NFET ")) {
    f.polarity = Polarity::NFET;
  } else if (in.accept("PFET ")) {
    f.polarity = Polarity::PFET;
  } else {
    throw NetlistParseError("expected 'NFET', 'PFET' or 'Contact'", 1);
  }
  f.id = in.number();
  in.expect(": S - ");
  f.source = in.number();
  in.expect(", D - ");
  f.drain = in.number();
  in.expect(", G - ");
  f.gate = in.number();
  in.expect(", L - ");
  f.length = in.number();
  in.expect(", W - ");
  f.width = in.number();
  in.expect(", Time = ");
  f.time = in.number();
  in.finish();
  return f;
}

std::string format_netlist_file(const std::vector<NetlistStatement>& statements) {
  std::string out;
  for (const auto& s : statements) {
    out += format_statement(s);
    out += '\n';
  }
  return out;
}

std::vector<NetlistStatement> parse_netlist_file(std::string_view text) {
  std::vector<NetlistStatement> out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(parse_statement(line));
    } catch (const NetlistParseError& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ", " + e.what());
    }
  }
  return out;
}

}  // namespace lbsim
