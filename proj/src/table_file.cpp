#include "nrlat/table_file.hpp"

#include <string>

#include "nrlat/errors.hpp"

namespace nrlat {

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.emplace_back(s.substr(pos));
            break;
        }
        out.emplace_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

std::vector<TableRow> parse_table(std::string_view text, std::string_view name)
{
    std::vector<TableRow> rows;
    int line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto cols = split(line, '\t');
        if (cols.size() < 2 || cols[0].empty() || cols[1].empty()) {
            throw ConfigError(std::string(name) + ":" + std::to_string(line_no) + ": expected key<TAB>value<TAB>source");
        }
        rows.push_back({cols[0], cols[1], cols.size() > 2 ? cols[2] : std::string(), line_no});
    }
    return rows;
}

}  // namespace nrlat
