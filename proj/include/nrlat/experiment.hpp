#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nrlat/phy.hpp"
#include "nrlat/sim_engine.hpp"

namespace nrlat {

/// Names accepted under `axes:` (and as scalar keys under `base:`).
const std::vector<std::string>& axis_names();

/// Sets one named field of `c` from its text form. Throws ConfigError.
void set_field(SimConfig& c, const std::string& name, const std::string& value);
std::string get_field(const SimConfig& c, const std::string& name);

struct Axis {
    std::string name;
    std::vector<std::string> values;
    bool operator==(const Axis&) const = default;
};

struct ExperimentSpec {
    std::string name = "sweep";
    SimConfig base;
    std::vector<Axis> axes;
    std::optional<CyclicPrefix> cp;  ///< Checked against every point's SCS.
    std::string output_dir = "results";
    std::uint64_t seed = 1;
    int workers = 1;
    bool operator==(const ExperimentSpec&) const = default;
};

/// Parses YAML text. Unknown keys and invalid values are ConfigErrors
/// carrying "<origin>:<line>: <path>: ...".
ExperimentSpec parse_spec(const std::string& text, const std::string& origin = "<spec>");
ExperimentSpec load_spec(const std::filesystem::path& file);
std::string serialize(const ExperimentSpec& spec);

struct SweepPoint {
    SimConfig config;
    std::string key;
};

/// Cartesian product of the axes in declaration order, last axis fastest.
std::vector<SweepPoint> expand(const ExperimentSpec& spec);

/// Full configuration tuple, fixed column order.
std::vector<std::pair<std::string, std::string>> config_tuple(const SimConfig& c, std::uint64_t seed);
std::string canonical_key(const SimConfig& c, std::uint64_t seed);

using ResultRow = std::map<std::string, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<ResultRow> rows;

    const ResultRow* find(const std::string& key) const;
    /// Orders rows by configuration tuple, numbers compared numerically.
    void sort();
};

std::vector<std::string> result_columns();
ResultRow report_row(const SimConfig& c, std::uint64_t seed, const MetricsReport& r);

void write_csv(std::ostream& os, const ResultTable& t);
ResultTable read_csv(std::istream& is);

struct SweepOutcome {
    ResultTable table;
    int ran = 0;
    int skipped = 0;
    int failed = 0;
    std::filesystem::path csv;
    std::filesystem::path sidecar;
};

/// Runs every point not already present (status ok) in
/// <output_dir>/<name>.csv. A failing point is recorded and the sweep goes on.
SweepOutcome run_sweep(const ExperimentSpec& spec, std::ostream* progress = nullptr);

/// Writes per-series (x, y) files for a figure analogue; returns the paths.
/// Throws ConfigError on unknown ids or columns the table lacks.
std::vector<std::filesystem::path> emit_figure_data(const ResultTable& table, const std::string& figure_id,
                                                    const std::filesystem::path& out_dir);
std::vector<std::string> figure_ids();

const char* code_version();

}  // namespace nrlat
