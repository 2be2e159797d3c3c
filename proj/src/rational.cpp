#include "pwtlab/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace pwt {

namespace {

std::int64_t parse_i64(const std::string& s) {
  if (s.empty()) throw Error(Err::InvalidArgument, "empty integer in rational literal");
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size())
    throw Error(Err::InvalidArgument, "bad integer in rational literal: '" + s + "'");
  return v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Rational(parse_i64(text.substr(0, slash)), parse_i64(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(parse_i64(text));

  const std::string head = text.substr(0, dot);
  const std::string tail = text.substr(dot + 1);
  if (tail.size() > 18) throw Error(Err::InvalidArgument, "decimal literal too long: '" + text + "'");
  for (char c : tail)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(Err::InvalidArgument, "bad decimal literal: '" + text + "'");

  std::int64_t den = 1;
  for (std::size_t i = 0; i < tail.size(); ++i) den *= 10;
  const bool neg = !head.empty() && head[0] == '-';
  const std::int64_t ip = head.empty() || head == "-" ? 0 : parse_i64(head);
  const std::int64_t fp = tail.empty() ? 0 : parse_i64(tail);
  Rational r = Rational(ip < 0 ? -ip : ip) + Rational(fp, den);
  return neg || ip < 0 ? -r : r;
}

}  // namespace pwt
