#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kcorr::detail {

// "name:k=v,k=v" split into name and ordered key/value pairs; commas inside [] are kept.
struct TaggedParams {
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;

  [[nodiscard]] const std::string* find(std::string_view key) const;
  [[nodiscard]] double number(std::string_view key, double fallback) const;
  [[nodiscard]] double required(std::string_view key) const;
};

[[nodiscard]] TaggedParams parse_tagged(std::string_view text);
[[nodiscard]] double parse_double(std::string_view s);
[[nodiscard]] std::string format_double(double v);

}  // namespace kcorr::detail
