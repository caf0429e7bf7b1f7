#include "text.hpp"

#include <charconv>

#include "kcorr/errors.hpp"

namespace kcorr::detail {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

const std::string* TaggedParams::find(std::string_view key) const {
  for (const auto& [k, v] : kv) {
    if (k == key) return &v;
  }
  return nullptr;
}

double TaggedParams::number(std::string_view key, double fallback) const {
  const auto* v = find(key);
  return v ? parse_double(*v) : fallback;
}

double TaggedParams::required(std::string_view key) const {
  const auto* v = find(key);
  if (!v) throw InputError(name + ": missing parameter '" + std::string(key) + "'");
  return parse_double(*v);
}

TaggedParams parse_tagged(std::string_view text) {
  TaggedParams out;
  const auto colon = text.find(':');
  out.name = trim(text.substr(0, colon));
  if (out.name.empty()) throw InputError("empty specification");
  if (colon == std::string_view::npos) return out;
  std::string_view rest = text.substr(colon + 1);
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto item = rest.substr(start, end - start);
    if (trim(item).empty()) return;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("expected key=value in '" + std::string(item) + "'");
    }
    out.kv.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
  };
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '[') ++depth;
    if (rest[i] == ']') --depth;
    if (rest[i] == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(rest.size());
  return out;
}

double parse_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw InputError("not a number: '" + t + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace kcorr::detail
