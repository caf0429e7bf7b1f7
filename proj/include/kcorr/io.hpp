#pragma once

#include <iosfwd>
#include <string>

#include "kcorr/hdp.hpp"
#include "kcorr/moments.hpp"

namespace kcorr {

// Header "group,value", group in {1,2}.
[[nodiscard]] GroupedData read_grouped_csv(std::istream& is);
[[nodiscard]] GroupedData read_grouped_csv_file(const std::string& path);
void write_grouped_csv(std::ostream& os, const GroupedData& data);

// Header "x11,x21,x12,x22"; for d > 1 the columns are x11_0, x11_1, ...
[[nodiscard]] BlockSet read_blocks_csv(std::istream& is);
void write_blocks_csv(std::ostream& os, const BlockSet& blocks);

// Writes to path, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace kcorr
