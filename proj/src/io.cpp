#include "kcorr/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "kcorr/errors.hpp"
#include "text.hpp"

namespace kcorr {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

GroupedData read_grouped_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("grouped csv: empty input");
  const auto header = split_row(line);
  if (header.size() != 2 || header[0] != "group" || header[1] != "value") {
    throw InputError("grouped csv: header must be 'group,value'");
  }
  GroupedData d;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (blank(line)) continue;
    const auto cells = split_row(line);
    if (cells.size() != 2) throw InputError("grouped csv: row " + std::to_string(row) + " malformed");
    const double g = detail::parse_double(cells[0]);
    if (g != 1.0 && g != 2.0) throw InputError("grouped csv: group must be 1 or 2");
    d.x[static_cast<int>(g) - 1].push_back(detail::parse_double(cells[1]));
  }
  return d;
}

GroupedData read_grouped_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_grouped_csv(in);
}

void write_grouped_csv(std::ostream& os, const GroupedData& data) {
  os << "group,value\n";
  for (int g = 0; g < 2; ++g) {
    for (double v : data.x[g]) os << g + 1 << "," << detail::format_double(v) << "\n";
  }
}

BlockSet read_blocks_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("blocks csv: empty input");
  const auto header = split_row(line);
  if (header.empty() || header.size() % 4 != 0) {
    throw InputError("blocks csv: expected 4 column groups");
  }
  const std::size_t d = header.size() / 4;
  const char* names[4] = {"x11", "x21", "x12", "x22"};
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const std::string want = d == 1 ? names[c] : std::string(names[c]) + "_" + std::to_string(j);
      if (header[c * d + j] != want) throw InputError("blocks csv: unexpected column " + header[c * d + j]);
    }
  }
  BlockSet out(d);
  while (std::getline(is, line)) {
    if (blank(line)) continue;
    const auto cells = split_row(line);
    if (cells.size() != 4 * d) throw InputError("blocks csv: ragged row");
    PairedBlock b;
    Point* cols[4] = {&b.x11, &b.x21, &b.x12, &b.x22};
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t j = 0; j < d; ++j) cols[c]->push_back(detail::parse_double(cells[c * d + j]));
    }
    out.push(b);
  }
  return out;
}

void write_blocks_csv(std::ostream& os, const BlockSet& blocks) {
  const std::size_t d = blocks.dim();
  const char* names[4] = {"x11", "x21", "x12", "x22"};
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      if (c || j) os << ",";
      os << names[c];
      if (d > 1) os << "_" << j;
    }
  }
  os << "\n";
  const Points* cols[4] = {&blocks.x11, &blocks.x21, &blocks.x12, &blocks.x22};
  for (std::size_t t = 0; t < blocks.size(); ++t) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t j = 0; j < d; ++j) {
        if (c || j) os << ",";
        os << detail::format_double((*cols[c])[t][j]);
      }
    }
    os << "\n";
  }
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

}  // namespace kcorr
