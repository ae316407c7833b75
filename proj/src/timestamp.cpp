#include <lexreg/timestamp.hpp>

#include <cctype>
#include <charconv>
#include <cstdio>

#include <lexreg/error.hpp>

namespace lexreg {

namespace {

class cursor {
 public:
  explicit cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  int digits(std::size_t count) {
    if (pos_ + count > text_.size()) bad();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + count, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ + count) bad();
    pos_ += count;
    return value;
  }

  void expect(char c) {
    if (peek() != c) bad();
    ++pos_;
  }

  void skip() { ++pos_; }

  [[noreturn]] void bad() const {
    fail(errc::parse_error, "malformed ISO-8601 timestamp '" + std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

instant parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  cursor in(text);
  int y = in.digits(4);
  in.expect('-');
  int mo = in.digits(2);
  in.expect('-');
  int d = in.digits(2);
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) in.bad();

  int hh = 0, mm = 0, ss = 0;
  if (!in.done()) {
    if (in.peek() != 'T' && in.peek() != ' ') in.bad();
    in.skip();
    hh = in.digits(2);
    in.expect(':');
    mm = in.digits(2);
    if (in.peek() == ':') {
      in.skip();
      ss = in.digits(2);
      if (in.peek() == '.') {
        in.skip();
        if (!std::isdigit(static_cast<unsigned char>(in.peek()))) in.bad();
        while (std::isdigit(static_cast<unsigned char>(in.peek()))) in.skip();
      }
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) in.bad();

  int offset_minutes = 0;
  if (!in.done()) {
    char c = in.peek();
    if (c == 'Z' || c == 'z') {
      in.skip();
    } else if (c == '+' || c == '-') {
      in.skip();
      int oh = in.digits(2);
      if (in.peek() == ':') in.skip();
      int om = in.digits(2);
      offset_minutes = (c == '+' ? 1 : -1) * (oh * 60 + om);
    } else {
      in.bad();
    }
  }
  if (!in.done()) in.bad();

  return sys_days{ymd} + hours{hh} + minutes{mm - offset_minutes} + seconds{ss};
}

std::string format_iso8601(instant t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss<seconds> tod{t - day_point};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(tod.hours().count()), static_cast<long long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  return buf;
}

}  // namespace lexreg
