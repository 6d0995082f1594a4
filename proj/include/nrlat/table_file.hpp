#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nrlat {

/// One row of a standards constants file: key, value, source citation.
struct TableRow {
    std::string key;
    std::string value;
    std::string source;
    int line = 0;
};

/// Parses the tab-separated constants format used under data/.
/// Lines starting with '#' and blank lines are skipped.
std::vector<TableRow> parse_table(std::string_view text, std::string_view name);

/// Splits `s` on `sep`.
std::vector<std::string> split(std::string_view s, char sep);

/// Embedded copies of the data/ files, generated at configure time.
namespace embedded {
std::string_view nrb_table();
std::string_view processing_table();
std::string_view mcs_table2();
std::string_view mcs_table3();
std::string_view cqi_table2();
std::string_view cqi_table3();
std::string_view tbs_table();
}  // namespace embedded

}  // namespace nrlat
