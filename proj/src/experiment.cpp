#include "nrlat/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "nrlat/errors.hpp"

namespace nrlat {

const char* code_version() { return NRLAT_VERSION; }

namespace {

std::string fmt(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

std::string fmt(long long x) { return std::to_string(x); }

int to_int(const std::string& name, const std::string& v)
{
    int x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(name + ": expected an integer, got '" + v + "'");
    return x;
}

double to_double(const std::string& name, const std::string& v)
{
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) {
        throw ConfigError(name + ": expected a number, got '" + v + "'");
    }
    return x;
}

std::optional<double> as_number(const std::string& v)
{
    if (v == "inf") return std::numeric_limits<double>::infinity();
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) return std::nullopt;
    return x;
}

CyclicPrefix cp_from_string(const std::string& s)
{
    if (s == "NCP" || s == "ncp" || s == "normal") return CyclicPrefix::Normal;
    if (s == "ECP" || s == "ecp" || s == "extended") return CyclicPrefix::Extended;
    throw ConfigError("cp: unknown cyclic prefix '" + s + "' (NCP, ECP)");
}

struct Field {
    const char* name;
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

#define INT_FIELD(key, member)                                                                         \
    Field{key, [](SimConfig& c, const std::string& v) { c.member = to_int(key, v); },                   \
          [](const SimConfig& c) { return fmt(static_cast<long long>(c.member)); }}
#define NUM_FIELD(key, member)                                                                         \
    Field{key, [](SimConfig& c, const std::string& v) { c.member = to_double(key, v); },                \
          [](const SimConfig& c) { return fmt(static_cast<double>(c.member)); }}
#define ENUM_FIELD(key, member, parse)                                                                 \
    Field{key, [](SimConfig& c, const std::string& v) { c.member = parse(v); },                        \
          [](const SimConfig& c) { return std::string(to_string(c.member)); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> f = {
        NUM_FIELD("density", density),
        INT_FIELD("bw_mhz", bw_mhz),
        INT_FIELD("scs_khz", scs_khz),
        ENUM_FIELD("slot_type", scheme.slot_type, slot_type_from_string),
        ENUM_FIELD("scheduling", scheme.scheduling, scheduling_from_string),
        ENUM_FIELD("retransmission", scheme.retransmission, retransmission_from_string),
        INT_FIELD("k", scheme.k),
        INT_FIELD("max_n", scheme.max_n),
        ENUM_FIELD("cast", scheme.dl_cast, cast_from_string),
        INT_FIELD("m", scheme.m),
        ENUM_FIELD("traffic", traffic.kind, traffic_kind_from_string),
        NUM_FIELD("period_ms", traffic.period_ms),
        INT_FIELD("packet_bytes", traffic.packet_bytes),
        ENUM_FIELD("mcs_table", scheme.mcs_table, mcs_table_from_string),
        ENUM_FIELD("control_variant", control_variant, control_variant_from_string),
        INT_FIELD("lanes", lanes),
        INT_FIELD("ue_capability", ue_capability),
        INT_FIELD("layers", layers),
        INT_FIELD("overhead_re_per_rb", overhead_re_per_rb),
        NUM_FIELD("warmup_ms", warmup_ms),
        NUM_FIELD("horizon_ms", horizon_ms),
        INT_FIELD("min_replications", min_replications),
        INT_FIELD("max_replications", max_replications),
        NUM_FIELD("target_relative_error", target_relative_error),
    };
    return f;
}

#undef INT_FIELD
#undef NUM_FIELD
#undef ENUM_FIELD

const Field* field(const std::string& name)
{
    for (const auto& f : fields()) {
        if (name == f.name) return &f;
    }
    return nullptr;
}

std::string cqi_map_text(const SimConfig& c)
{
    if (!c.cqi_map) return "default";
    std::string s;
    for (const auto& e : *c.cqi_map) s += (s.empty() ? "" : "/") + fmt(e.distance_upper_bound_m) + ":" + fmt(static_cast<long long>(e.cqi));
    return s;
}

std::string baseline_text(const SimConfig& c)
{
    if (!c.control_baseline) return "default";
    const auto& b = *c.control_baseline;
    return fmt(static_cast<long long>(b.n_rb_pdcch)) + "x" + fmt(static_cast<long long>(b.n_sy_pdcch)) + "/" +
           fmt(static_cast<long long>(b.n_rb_pucch)) + "x" + fmt(static_cast<long long>(b.n_sy_pucch));
}

// Checks that need no simulation: evaluated numerology, carrier, scheme.
void check_point(const SimConfig& c, const std::optional<CyclicPrefix>& cp)
{
    NumerologyProfile::for_scs(c.scs_khz);
    if (cp) NumerologyProfile::make(c.scs_khz, *cp);
    if (!PhyTables::standard().supports(c.bw_mhz, c.scs_khz)) {
        throw ConfigError("no RB count for " + std::to_string(c.bw_mhz) + " MHz at " + std::to_string(c.scs_khz) +
                          " kHz");
    }
    c.scheme.validate();
    if (c.density <= 0) throw ConfigError("density must be positive");
    if (c.traffic.period_ms <= 0) throw ConfigError("period_ms must be positive");
    if (c.horizon_ms <= c.warmup_ms) throw ConfigError("horizon_ms must exceed warmup_ms");
    if (c.min_replications < 1 || c.max_replications < c.min_replications) {
        throw ConfigError("need 1 <= min_replications <= max_replications");
    }
}

[[noreturn]] void fail_at(const std::string& origin, const YAML::Node& n, const std::string& path, const std::string& msg)
{
    throw ConfigError(origin + ":" + std::to_string(n.Mark().line + 1) + ": " + path + ": " + msg);
}

std::string scalar(const std::string& origin, const YAML::Node& n, const std::string& path)
{
    if (!n.IsScalar()) fail_at(origin, n, path, "expected a scalar");
    return n.Scalar();
}

void parse_base(ExperimentSpec& spec, const YAML::Node& base, const std::string& origin)
{
    if (!base.IsMap()) fail_at(origin, base, "base", "expected a mapping");
    for (const auto& kv : base) {
        const std::string key = kv.first.Scalar();
        const std::string path = "base." + key;
        try {
            if (key == "cqi_map") {
                if (!kv.second.IsSequence()) fail_at(origin, kv.second, path, "expected a list of [distance_m, cqi]");
                std::vector<CqiMapEntry> map;
                for (const auto& e : kv.second) {
                    if (!e.IsSequence() || e.size() != 2) fail_at(origin, e, path, "entries are [distance_m, cqi]");
                    map.push_back({to_double(path, scalar(origin, e[0], path)), to_int(path, scalar(origin, e[1], path))});
                }
                spec.base.cqi_map = map;
                LinkProfile::with_map(spec.base.scheme.mcs_table, map);
            } else if (key == "control_baseline") {
                if (!kv.second.IsMap()) fail_at(origin, kv.second, path, "expected a mapping");
                ControlConfig b;
                for (const auto& f : kv.second) {
                    const std::string k = f.first.Scalar();
                    const int v = to_int(path + "." + k, scalar(origin, f.second, path + "." + k));
                    if (k == "n_rb_pdcch") b.n_rb_pdcch = v;
                    else if (k == "n_sy_pdcch") b.n_sy_pdcch = v;
                    else if (k == "n_rb_pucch") b.n_rb_pucch = v;
                    else if (k == "n_sy_pucch") b.n_sy_pucch = v;
                    else fail_at(origin, f.first, path + "." + k, "unknown key");
                }
                spec.base.control_baseline = b;
            } else if (const Field* f = field(key)) {
                f->set(spec.base, scalar(origin, kv.second, path));
            } else {
                fail_at(origin, kv.first, path, "unknown key");
            }
        } catch (const YAML::Exception& e) {
            fail_at(origin, kv.second, path, e.what());
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            if (what.rfind(origin + ":", 0) == 0) throw;
            fail_at(origin, kv.second, path, what);
        } catch (const std::exception& e) {
            fail_at(origin, kv.second, path, e.what());
        }
    }
}

void parse_axes(ExperimentSpec& spec, const YAML::Node& axes, const std::string& origin)
{
    if (!axes.IsMap()) fail_at(origin, axes, "axes", "expected a mapping of name: [values]");
    for (const auto& kv : axes) {
        const std::string name = kv.first.Scalar();
        const std::string path = "axes." + name;
        const Field* f = field(name);
        if (f == nullptr) fail_at(origin, kv.first, path, "unknown axis");
        for (const auto& a : spec.axes) {
            if (a.name == name) fail_at(origin, kv.first, path, "axis given twice");
        }
        const YAML::Node& vals = kv.second;
        if (!vals.IsSequence() || vals.size() == 0) fail_at(origin, vals, path, "expected a non-empty list");
        Axis axis{name, {}};
        for (const auto& v : vals) {
            const std::string s = scalar(origin, v, path);
            SimConfig probe = spec.base;
            try {
                f->set(probe, s);
                check_point(probe, spec.cp);
            } catch (const std::exception& e) {
                fail_at(origin, v, path, e.what());
            }
            axis.values.push_back(s);
        }
        spec.axes.push_back(std::move(axis));
    }
}

}  // namespace

const std::vector<std::string>& axis_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : fields()) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

void set_field(SimConfig& c, const std::string& name, const std::string& value)
{
    const Field* f = field(name);
    if (f == nullptr) throw ConfigError("unknown field '" + name + "'");
    f->set(c, value);
}

std::string get_field(const SimConfig& c, const std::string& name)
{
    const Field* f = field(name);
    if (f == nullptr) throw ConfigError("unknown field '" + name + "'");
    return f->get(c);
}

ExperimentSpec parse_spec(const std::string& text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    ExperimentSpec spec;
    if (root.IsNull()) return spec;
    if (!root.IsMap()) fail_at(origin, root, "<root>", "expected a mapping");

    // cp and base first: axis values are checked against them.
    if (root["cp"]) {
        try {
            spec.cp = cp_from_string(scalar(origin, root["cp"], "cp"));
        } catch (const ConfigError& e) {
            fail_at(origin, root["cp"], "cp", e.what());
        }
    }
    if (root["base"]) parse_base(spec, root["base"], origin);
    try {
        check_point(spec.base, spec.cp);
    } catch (const std::exception& e) {
        fail_at(origin, root["base"] ? root["base"] : root, "base", e.what());
    }
    for (const auto& kv : root) {
        const std::string key = kv.first.Scalar();
        const YAML::Node& v = kv.second;
        if (key == "cp" || key == "base") continue;
        if (key == "axes") {
            parse_axes(spec, v, origin);
        } else if (key == "name") {
            spec.name = scalar(origin, v, key);
            if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos) {
                fail_at(origin, v, key, "must be a plain file stem");
            }
        } else if (key == "output_dir") {
            spec.output_dir = scalar(origin, v, key);
        } else if (key == "seed") {
            try {
                spec.seed = v.as<std::uint64_t>();
            } catch (const YAML::Exception&) {
                fail_at(origin, v, key, "expected an unsigned integer");
            }
        } else if (key == "workers") {
            try {
                spec.workers = v.as<int>();
            } catch (const YAML::Exception&) {
                fail_at(origin, v, key, "expected an integer");
            }
            if (spec.workers < 1) fail_at(origin, v, key, "must be at least 1");
        } else {
            fail_at(origin, kv.first, key, "unknown key");
        }
    }
    // Combinations of individually valid values can still clash.
    for (const auto& p : expand(spec)) {
        try {
            check_point(p.config, spec.cp);
        } catch (const std::exception& e) {
            fail_at(origin, root["axes"], "axes", "point " + p.key + ": " + e.what());
        }
    }
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), file.string());
}

std::string serialize(const ExperimentSpec& spec)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << spec.name;
    out << YAML::Key << "seed" << YAML::Value << spec.seed;
    out << YAML::Key << "workers" << YAML::Value << spec.workers;
    out << YAML::Key << "output_dir" << YAML::Value << spec.output_dir;
    if (spec.cp) out << YAML::Key << "cp" << YAML::Value << (*spec.cp == CyclicPrefix::Normal ? "NCP" : "ECP");
    out << YAML::Key << "base" << YAML::Value << YAML::BeginMap;
    for (const auto& f : fields()) out << YAML::Key << f.name << YAML::Value << f.get(spec.base);
    if (spec.base.cqi_map) {
        out << YAML::Key << "cqi_map" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : *spec.base.cqi_map) {
            out << YAML::Flow << YAML::BeginSeq << fmt(e.distance_upper_bound_m) << e.cqi << YAML::EndSeq;
        }
        out << YAML::EndSeq;
    }
    if (spec.base.control_baseline) {
        const auto& b = *spec.base.control_baseline;
        out << YAML::Key << "control_baseline" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "n_rb_pdcch" << YAML::Value << b.n_rb_pdcch;
        out << YAML::Key << "n_sy_pdcch" << YAML::Value << b.n_sy_pdcch;
        out << YAML::Key << "n_rb_pucch" << YAML::Value << b.n_rb_pucch;
        out << YAML::Key << "n_sy_pucch" << YAML::Value << b.n_sy_pucch;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    if (!spec.axes.empty()) {
        out << YAML::Key << "axes" << YAML::Value << YAML::BeginMap;
        for (const auto& a : spec.axes) {
            out << YAML::Key << a.name << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (const auto& v : a.values) out << v;
            out << YAML::EndSeq;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::vector<SweepPoint> expand(const ExperimentSpec& spec)
{
    std::vector<SweepPoint> points;
    std::vector<std::size_t> idx(spec.axes.size(), 0);
    for (;;) {
        SweepPoint p{spec.base, {}};
        for (std::size_t i = 0; i < spec.axes.size(); ++i) set_field(p.config, spec.axes[i].name, spec.axes[i].values[idx[i]]);
        p.key = canonical_key(p.config, spec.seed);
        points.push_back(std::move(p));
        std::size_t i = spec.axes.size();
        while (i > 0) {
            --i;
            if (++idx[i] < spec.axes[i].values.size()) break;
            idx[i] = 0;
            if (i == 0) return points;
        }
        if (spec.axes.empty()) return points;
    }
}

std::vector<std::pair<std::string, std::string>> config_tuple(const SimConfig& c, std::uint64_t seed)
{
    std::vector<std::pair<std::string, std::string>> t;
    for (const auto& f : fields()) t.emplace_back(f.name, f.get(c));
    t.emplace_back("cqi_map", cqi_map_text(c));
    t.emplace_back("control_baseline", baseline_text(c));
    t.emplace_back("seed", std::to_string(seed));
    return t;
}

std::string canonical_key(const SimConfig& c, std::uint64_t seed)
{
    std::string k;
    for (const auto& [n, v] : config_tuple(c, seed)) k += (k.empty() ? "" : ";") + n + "=" + v;
    return k;
}

namespace {

const std::vector<std::string>& metric_columns()
{
    static const std::vector<std::string> m = {
        "mean_l_radio_ms", "mean_ul_ms", "mean_dl_ms", "p90_ms", "p9999_ms", "within_6ms",
        "drop_fraction", "delivery_failure_fraction", "rb_utilization_ul", "rb_utilization_dl",
        "mean_rbs_ul", "mean_rbs_dl", "ci_relative_error", "max_t_fa_ms", "t_fa_over_slot",
        "replications", "generated", "delivered", "dropped", "delivery_failed",
        "lloa_pass", "hloa_pass", "lloa_margin_ms", "hloa_margin_ms"};
    return m;
}

std::vector<std::string> tuple_columns()
{
    std::vector<std::string> c;
    for (const auto& [n, v] : config_tuple(SimConfig{}, 0)) c.push_back(n);
    return c;
}

}  // namespace

std::vector<std::string> result_columns()
{
    std::vector<std::string> c{"key"};
    for (const auto& n : tuple_columns()) c.push_back(n);
    for (const auto& n : metric_columns()) c.push_back(n);
    c.emplace_back("status");
    c.emplace_back("error");
    return c;
}

ResultRow report_row(const SimConfig& c, std::uint64_t seed, const MetricsReport& r)
{
    ResultRow row;
    row["key"] = canonical_key(c, seed);
    for (const auto& [n, v] : config_tuple(c, seed)) row[n] = v;
    const auto ll = check_requirement(r, Service::LLoA);
    const auto hl = check_requirement(r, Service::HLoA);
    row["mean_l_radio_ms"] = fmt(r.mean_l_radio_ms);
    row["mean_ul_ms"] = fmt(r.mean_ul_ms);
    row["mean_dl_ms"] = fmt(r.mean_dl_ms);
    row["p90_ms"] = fmt(r.p90_ms);
    row["p9999_ms"] = fmt(r.p9999_ms);
    row["within_6ms"] = fmt(r.fraction_within(6.0));
    row["drop_fraction"] = fmt(r.drop_fraction);
    row["delivery_failure_fraction"] = fmt(r.delivery_failure_fraction);
    row["rb_utilization_ul"] = fmt(r.rb_utilization_ul);
    row["rb_utilization_dl"] = fmt(r.rb_utilization_dl);
    row["mean_rbs_ul"] = fmt(r.mean_rbs_ul);
    row["mean_rbs_dl"] = fmt(r.mean_rbs_dl);
    row["ci_relative_error"] = fmt(r.ci_relative_error);
    row["max_t_fa_ms"] = fmt(r.max_t_fa_ms);
    row["t_fa_over_slot"] = std::to_string(r.t_fa_over_slot);
    row["replications"] = std::to_string(r.replications);
    row["generated"] = std::to_string(r.generated);
    row["delivered"] = std::to_string(r.delivered);
    row["dropped"] = std::to_string(r.dropped);
    row["delivery_failed"] = std::to_string(r.failed);
    row["lloa_pass"] = ll.pass ? "1" : "0";
    row["hloa_pass"] = hl.pass ? "1" : "0";
    row["lloa_margin_ms"] = fmt(ll.margin_ms);
    row["hloa_margin_ms"] = fmt(hl.margin_ms);
    row["status"] = "ok";
    row["error"] = "";
    return row;
}

const ResultRow* ResultTable::find(const std::string& key) const
{
    for (const auto& r : rows) {
        auto it = r.find("key");
        if (it != r.end() && it->second == key) return &r;
    }
    return nullptr;
}

void ResultTable::sort()
{
    const auto order = tuple_columns();
    auto less = [&](const ResultRow& a, const ResultRow& b) {
        for (const auto& c : order) {
            auto ia = a.find(c);
            auto ib = b.find(c);
            const std::string va = ia == a.end() ? "" : ia->second;
            const std::string vb = ib == b.end() ? "" : ib->second;
            if (va == vb) continue;
            auto na = as_number(va);
            auto nb = as_number(vb);
            if (na && nb && *na != *nb) return *na < *nb;
            return va < vb;
        }
        return false;
    };
    std::stable_sort(rows.begin(), rows.end(), less);
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

// One record; handles quoted fields spanning lines.
bool read_record(std::istream& is, std::vector<std::string>& out)
{
    out.clear();
    std::string cur;
    bool quoted = false;
    bool any = false;
    char ch;
    while (is.get(ch)) {
        any = true;
        if (quoted) {
            if (ch == '"') {
                if (is.peek() == '"') {
                    cur += '"';
                    is.get();
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (ch == '\n') {
            out.push_back(std::move(cur));
            return true;
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    if (!any) return false;
    out.push_back(std::move(cur));
    return true;
}

}  // namespace

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& columns, const ResultRow& r)
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        auto it = r.find(columns[i]);
        os << (i ? "," : "") << csv_field(it == r.end() ? "" : it->second);
    }
    os << "\n";
}

}  // namespace

void write_csv(std::ostream& os, const ResultTable& t)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << "\n";
    for (const auto& r : t.rows) write_row(os, t.columns, r);
}

ResultTable read_csv(std::istream& is)
{
    ResultTable t;
    std::vector<std::string> rec;
    if (!read_record(is, t.columns)) return t;
    std::map<std::string, std::size_t> by_key;
    while (read_record(is, rec)) {
        if (rec.size() == 1 && rec[0].empty()) continue;
        if (rec.size() != t.columns.size()) {
            throw ConfigError("csv: row has " + std::to_string(rec.size()) + " fields, header has " +
                              std::to_string(t.columns.size()));
        }
        ResultRow row;
        for (std::size_t i = 0; i < rec.size(); ++i) row[t.columns[i]] = rec[i];
        // A later row for the same key supersedes an earlier one.
        auto k = row.find("key");
        if (k != row.end()) {
            auto [it, fresh] = by_key.emplace(k->second, t.rows.size());
            if (!fresh) {
                t.rows[it->second] = std::move(row);
                continue;
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

SweepOutcome run_sweep(const ExperimentSpec& spec, std::ostream* progress)
{
    namespace fs = std::filesystem;
    SweepOutcome out;
    const fs::path dir(spec.output_dir);
    fs::create_directories(dir);
    out.csv = dir / (spec.name + ".csv");
    out.sidecar = dir / (spec.name + ".json");

    ResultTable table;
    if (fs::exists(out.csv)) {
        std::ifstream in(out.csv);
        table = read_csv(in);
        if (!table.columns.empty() && table.columns != result_columns()) {
            throw ConfigError(out.csv.string() + ": columns differ from this version's; use another output_dir");
        }
    }
    table.columns = result_columns();

    std::vector<SweepPoint> todo;
    for (auto& p : expand(spec)) {
        const ResultRow* r = table.find(p.key);
        if (r != nullptr && r->at("status") == "ok") {
            ++out.skipped;
            continue;
        }
        if (std::none_of(todo.begin(), todo.end(), [&](const SweepPoint& q) { return q.key == p.key; })) {
            todo.push_back(std::move(p));
        }
    }

    // Rows are appended as they finish so an interrupted sweep resumes.
    const bool fresh = !fs::exists(out.csv) || fs::file_size(out.csv) == 0;
    std::ofstream journal(out.csv, std::ios::app);
    if (fresh) write_csv(journal, ResultTable{table.columns, {}});
    journal.flush();

    std::mutex m;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= todo.size()) return;
            const SweepPoint& p = todo[i];
            ResultRow row;
            try {
                SimConfig c = p.config;
                c.workers = 1;
                row = report_row(c, spec.seed, run(c, spec.seed));
            } catch (const std::exception& e) {
                row["key"] = p.key;
                for (const auto& [n, v] : config_tuple(p.config, spec.seed)) row[n] = v;
                row["status"] = "failed";
                row["error"] = e.what();
            }
            std::lock_guard<std::mutex> lock(m);
            write_row(journal, table.columns, row);
            journal.flush();
            if (row["status"] == "ok") {
                ++out.ran;
            } else {
                ++out.failed;
            }
            bool replaced = false;
            for (auto& r : table.rows) {
                if (r["key"] == p.key) {
                    r = row;
                    replaced = true;
                }
            }
            if (!replaced) table.rows.push_back(row);
            if (progress != nullptr) {
                *progress << "[" << (out.ran + out.failed) << "/" << todo.size() << "] " << row["status"];
                for (const auto& a : spec.axes) *progress << " " << a.name << "=" << get_field(p.config, a.name);
                if (row["status"] != "ok") *progress << " : " << row["error"];
                *progress << "\n";
            }
        }
    };
    const int n = std::max(1, std::min<int>(spec.workers, static_cast<int>(todo.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    journal.close();

    table.sort();
    {
        const fs::path tmp = out.csv.string() + ".tmp";
        std::ofstream os(tmp);
        write_csv(os, table);
        os.close();
        fs::rename(tmp, out.csv);
    }

    nlohmann::json side;
    if (fs::exists(out.sidecar)) {
        std::ifstream in(out.sidecar);
        try {
            side = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception&) {
            side = nlohmann::json::object();
        }
    }
    side["name"] = spec.name;
    side["code_version"] = code_version();
    side["seed"] = spec.seed;
    side["spec"] = serialize(spec);
    for (const auto& p : expand(spec)) {
        try {
            side["points"][p.key] = config_to_json(p.config);
        } catch (const std::exception& e) {
            side["points"][p.key] = {{"error", e.what()}};
        }
    }
    std::ofstream js(out.sidecar);
    js << side.dump(2) << "\n";

    out.table = std::move(table);
    return out;
}

}  // namespace nrlat
