#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "nrlat/errors.hpp"
#include "nrlat/experiment.hpp"

namespace nrlat {

namespace {

struct Figure {
    const char* id;
    const char* x;
    std::vector<std::string> y;
    std::vector<std::string> series;  // axes that split the curves
};

// x axis, plotted metrics and the axes the legend distinguishes.
const std::vector<Figure>& registry()
{
    static const std::vector<Figure> r = {
        {"fig3", "density", {"mean_l_radio_ms"}, {"m", "mcs_table", "period_ms"}},
        {"fig4", "density", {"mean_l_radio_ms"}, {"mcs_table", "period_ms"}},
        {"fig5", "bw_mhz", {"mean_l_radio_ms"}, {"cast", "m", "mcs_table"}},
        {"fig6", "density", {"mean_l_radio_ms"}, {"retransmission", "k", "max_n", "mcs_table", "period_ms"}},
        {"fig7", "density", {"mean_l_radio_ms", "rb_utilization_ul", "rb_utilization_dl"}, {"scs_khz", "slot_type"}},
        {"fig8", "density", {"mean_l_radio_ms", "p90_ms"}, {"scs_khz", "slot_type"}},
        {"fig9", "density", {"within_6ms"}, {"scs_khz", "slot_type", "mcs_table", "retransmission"}},
        {"fig10", "bw_mhz", {"within_6ms"}, {"scs_khz", "slot_type", "mcs_table", "retransmission"}},
        {"fig11", "density", {"mean_l_radio_ms", "p9999_ms"}, {"scs_khz", "mcs_table", "retransmission"}},
        {"fig12", "density", {"mean_l_radio_ms", "drop_fraction"}, {"traffic", "scheduling", "control_variant"}},
        {"fig13", "density", {"mean_l_radio_ms", "p90_ms"}, {"scs_khz", "slot_type"}},
        {"fig14", "density", {"mean_l_radio_ms", "p9999_ms"}, {"scs_khz"}},
        {"fig15", "bw_mhz", {"p9999_ms"}, {"scs_khz", "slot_type"}},
    };
    return r;
}

double num(const std::string& s)
{
    if (s == "inf") return 1e300;
    double x = 0;
    std::from_chars(s.data(), s.data() + s.size(), x);
    return x;
}

}  // namespace

std::vector<std::string> figure_ids()
{
    std::vector<std::string> ids;
    for (const auto& f : registry()) ids.emplace_back(f.id);
    return ids;
}

std::vector<std::filesystem::path> emit_figure_data(const ResultTable& table, const std::string& figure_id,
                                                    const std::filesystem::path& out_dir)
{
    auto it = std::find_if(registry().begin(), registry().end(), [&](const Figure& f) { return figure_id == f.id; });
    if (it == registry().end()) throw ConfigError("unknown figure '" + figure_id + "'");
    const Figure& fig = *it;

    std::vector<std::string> need{fig.x, "status"};
    need.insert(need.end(), fig.y.begin(), fig.y.end());
    need.insert(need.end(), fig.series.begin(), fig.series.end());
    for (const auto& c : need) {
        if (std::find(table.columns.begin(), table.columns.end(), c) == table.columns.end()) {
            throw ConfigError(figure_id + ": table has no column '" + c + "'");
        }
    }

    // Only axes that actually vary name a series.
    std::vector<std::string> split;
    for (const auto& s : fig.series) {
        std::set<std::string> seen;
        for (const auto& r : table.rows) {
            if (r.at("status") == "ok") seen.insert(r.at(s));
        }
        if (seen.size() > 1) split.push_back(s);
    }

    std::map<std::string, std::vector<const ResultRow*>> groups;
    for (const auto& r : table.rows) {
        if (r.at("status") != "ok") continue;
        std::string label;
        for (const auto& s : split) label += "_" + s + "=" + r.at(s);
        groups[label].push_back(&r);
    }
    if (groups.empty()) throw ConfigError(figure_id + ": no completed rows");

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> files;
    for (const auto& y : fig.y) {
        for (auto& [label, rows] : groups) {
            std::stable_sort(rows.begin(), rows.end(),
                             [&](const ResultRow* a, const ResultRow* b) { return num(a->at(fig.x)) < num(b->at(fig.x)); });
            const auto path = out_dir / (figure_id + "_" + y + label + ".dat");
            std::ofstream os(path);
            os << "# " << fig.x << "\t" << y << "\n";
            for (const ResultRow* r : rows) os << r->at(fig.x) << "\t" << r->at(y) << "\n";
            files.push_back(path);
        }
    }
    return files;
}

}  // namespace nrlat
