#include "nrlat/link.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nrlat/errors.hpp"
#include "nrlat/table_file.hpp"

namespace nrlat {

const char* to_string(McsTable t) { return t == McsTable::LEP ? "LEP" : "HEP"; }

McsTable mcs_table_from_string(std::string_view s)
{
    if (s == "LEP" || s == "lep") return McsTable::LEP;
    if (s == "HEP" || s == "hep") return McsTable::HEP;
    throw ConfigError("unknown MCS table '" + std::string(s) + "' (LEP, HEP)");
}

double target_bler(McsTable t) { return t == McsTable::LEP ? 0.1 : 1e-5; }

namespace {

template <typename Entry>
std::vector<Entry> load_entries(std::string_view text, std::string_view name)
{
    std::vector<Entry> out;
    for (const auto& row : parse_table(text, name)) {
        auto f = split(row.value, ':');
        if (f.size() != 3) {
            throw ConfigError(std::string(name) + ":" + std::to_string(row.line) + ": value must be Qm:rate:SE");
        }
        Entry e;
        e.index = std::stoi(row.key);
        e.modulation_order = std::stoi(f[0]);
        e.rate_x1024 = std::stoi(f[1]);
        if constexpr (std::is_same_v<Entry, McsEntry>) {
            e.spectral_efficiency = std::stod(f[2]);
        } else {
            e.efficiency = std::stod(f[2]);
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace

const LinkTables& LinkTables::standard()
{
    static const LinkTables tables = [] {
        LinkTables t;
        t.mcs2_ = load_entries<McsEntry>(embedded::mcs_table2(), "mcs_table2");
        t.mcs3_ = load_entries<McsEntry>(embedded::mcs_table3(), "mcs_table3");
        t.cqi2_ = load_entries<CqiEntry>(embedded::cqi_table2(), "cqi_table2");
        t.cqi3_ = load_entries<CqiEntry>(embedded::cqi_table3(), "cqi_table3");
        for (const auto& row : parse_table(embedded::tbs_table(), "tbs_table")) {
            t.tbs_.push_back(std::stoi(row.value));
        }
        return t;
    }();
    return tables;
}

int default_edge_cqi(McsTable table) { return table == McsTable::LEP ? 7 : 6; }

std::vector<CqiMapEntry> linear_cqi_map(int best, int worst, double radius_m)
{
    if (best < worst || worst < 0) {
        throw ConfigError("linear CQI map needs best >= worst >= 0");
    }
    const int n = best - worst + 1;
    std::vector<CqiMapEntry> map;
    for (int j = 0; j < n; ++j) {
        map.push_back({radius_m * (j + 1) / n, best - j});
    }
    map.back().distance_upper_bound_m = radius_m;
    return map;
}

LinkProfile LinkProfile::make(McsTable table)
{
    return with_map(table, linear_cqi_map(15, default_edge_cqi(table)));
}

LinkProfile LinkProfile::with_map(McsTable table, std::vector<CqiMapEntry> map)
{
    LinkProfile p;
    p.mcs_table = table;
    p.target_bler = nrlat::target_bler(table);
    p.cqi_map = std::move(map);
    p.validate();
    return p;
}

void LinkProfile::validate() const
{
    if (target_bler != nrlat::target_bler(mcs_table)) {
        throw ConfigError(std::string(to_string(mcs_table)) + " requires target BLER " +
                          std::to_string(nrlat::target_bler(mcs_table)));
    }
    if (cqi_map.empty()) throw ConfigError("CQI map is empty");
    double prev = 0.0;
    for (const auto& e : cqi_map) {
        if (e.distance_upper_bound_m <= prev) {
            throw ConfigError("CQI map bounds must be strictly increasing and positive");
        }
        if (e.cqi < 0 || e.cqi > 15) throw ConfigError("CQI map entry outside 0..15");
        prev = e.distance_upper_bound_m;
    }
    if (cqi_map.back().distance_upper_bound_m < kCellRadiusM) {
        throw ConfigError("CQI map must cover the cell radius (" + std::to_string(kCellRadiusM) + " m)");
    }
}

int cqi_from_distance(double distance_m, const LinkProfile& profile)
{
    if (!(distance_m >= 0.0) || distance_m > kCellRadiusM) {
        throw ConfigError("distance " + std::to_string(distance_m) + " m outside the cell");
    }
    for (const auto& e : profile.cqi_map) {
        if (e.distance_upper_bound_m >= distance_m) return e.cqi;
    }
    return profile.cqi_map.back().cqi;
}

const McsEntry& mcs_from_cqi(int cqi, McsTable table)
{
    const auto& tables = LinkTables::standard();
    const auto& cqis = tables.cqi(table);
    if (cqi < 1 || cqi > static_cast<int>(cqis.size())) {
        throw NoTransmission("CQI " + std::to_string(cqi) + " is out of range");
    }
    const double se = cqis[cqi - 1].efficiency;
    const auto& mcs = tables.mcs(table);
    const McsEntry* best = nullptr;
    for (const auto& m : mcs) {
        if (m.spectral_efficiency <= se + 1e-9) best = &m;
    }
    if (best == nullptr) {
        throw NoTransmission("CQI " + std::to_string(cqi) + " is below every " + to_string(table) + " MCS");
    }
    return *best;
}

long transport_block_size(const McsEntry& mcs, int n_rb, int n_symbols, int layers, int overhead_re_per_rb)
{
    const int re_per_rb = std::min(156, 12 * n_symbols - overhead_re_per_rb);
    if (re_per_rb <= 0 || n_rb <= 0) return 0;
    const double n_re = static_cast<double>(re_per_rb) * n_rb;
    const double r = mcs.code_rate();
    const double n_info = n_re * r * mcs.modulation_order * layers;

    if (n_info <= 3824.0) {
        const int n = std::max(3, static_cast<int>(std::floor(std::log2(n_info))) - 6);
        const double step = std::ldexp(1.0, n);
        const double q = std::max(24.0, step * std::floor(n_info / step));
        const auto& tbs = LinkTables::standard().tbs();
        auto it = std::lower_bound(tbs.begin(), tbs.end(), static_cast<int>(q));
        return it == tbs.end() ? tbs.back() : *it;
    }
    const int n = static_cast<int>(std::floor(std::log2(n_info - 24.0))) - 5;
    const double step = std::ldexp(1.0, n);
    const double q = std::max(3840.0, step * std::round((n_info - 24.0) / step));
    if (r <= 0.25) {
        const double c = std::ceil((q + 24.0) / 3816.0);
        return static_cast<long>(8.0 * c * std::ceil((q + 24.0) / (8.0 * c)) - 24.0);
    }
    if (q > 8424.0) {
        const double c = std::ceil((q + 24.0) / 8424.0);
        return static_cast<long>(8.0 * c * std::ceil((q + 24.0) / (8.0 * c)) - 24.0);
    }
    return static_cast<long>(8.0 * std::ceil((q + 24.0) / 8.0) - 24.0);
}

int rbs_for_packet(long payload_bits, const McsEntry& mcs, int n_symbols, int layers, int overhead_re_per_rb,
                   int max_rb)
{
    if (payload_bits <= 0) throw ConfigError("payload must be positive");
    if (transport_block_size(mcs, max_rb, n_symbols, layers, overhead_re_per_rb) < payload_bits) {
        throw InfeasibleAllocation(std::to_string(payload_bits) + " bits do not fit " + std::to_string(max_rb) +
                                   " RBs x " + std::to_string(n_symbols) + " symbols at MCS " +
                                   std::to_string(mcs.index));
    }
    int lo = 1;
    int hi = max_rb;
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (transport_block_size(mcs, mid, n_symbols, layers, overhead_re_per_rb) >= payload_bits) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

}  // namespace nrlat
