#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nrlat/control_config.hpp"
#include "nrlat/latency.hpp"
#include "nrlat/link.hpp"
#include "nrlat/scenario.hpp"
#include "nrlat/scheme.hpp"
#include "nrlat/stats.hpp"

namespace nrlat {

/// Everything one simulation point needs.
struct SimConfig {
    SchemeConfig scheme;
    int scs_khz = 30;
    int bw_mhz = 20;
    double density = 20.0;  ///< veh/km/lane
    int lanes = 6;
    TrafficModel traffic;
    ControlVariant control_variant = ControlVariant::Conf1;
    std::optional<ControlConfig> control_baseline;  ///< Overrides the numerology's conf1.
    std::optional<std::vector<CqiMapEntry>> cqi_map;
    int ue_capability = 2;
    int layers = kDefaultLayers;
    int overhead_re_per_rb = kDefaultOverheadRePerRb;

    double warmup_ms = 200.0;
    double horizon_ms = 10000.0;
    int min_replications = 10;
    int max_replications = 200;
    double target_relative_error = 0.01;
    int workers = 1;

    NumerologyProfile numerology() const { return NumerologyProfile::for_scs(scs_khz); }
    ControlConfig control() const;
    LinkProfile link() const;
    int total_rbs() const;
    /// Throws ConfigError / InfeasibleAllocation / NoTransmission with diagnostics.
    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

/// Statistics of one replication.
struct ReplicationResult {
    std::uint64_t index = 0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t failed = 0;
    LatencyHistogram latency;     ///< Delivered finite, dropped infinite.
    double mean_ms = 0.0;         ///< Over delivered packets.
    long double ul_sum_ms = 0.0L;
    long double dl_sum_ms = 0.0L;
    std::int64_t util_ul_num = 0, util_ul_den = 0;
    std::int64_t util_dl_num = 0, util_dl_den = 0;
    std::uint64_t rb_ul_sum = 0, rb_dl_sum = 0, rb_ul_n = 0, rb_dl_n = 0;
    Tick max_t_fa = 0;
    std::uint64_t t_fa_over_slot = 0;
    std::uint64_t legs = 0;
};

struct Requirement {
    bool pass = false;
    double quantile = 0.0;
    double budget_ms = 0.0;
    double latency_ms = 0.0;  ///< +inf when dropped packets reach the percentile.
    double margin_ms = 0.0;   ///< budget - latency
};

enum class Service { LLoA, HLoA };
const char* to_string(Service s);

struct MetricsReport {
    double mean_l_radio_ms = 0.0;
    double mean_ul_ms = 0.0;
    double mean_dl_ms = 0.0;
    double p90_ms = 0.0;
    double p9999_ms = 0.0;
    double drop_fraction = 0.0;
    double delivery_failure_fraction = 0.0;
    double rb_utilization_ul = 0.0;
    double rb_utilization_dl = 0.0;
    double mean_rbs_ul = 0.0;
    double mean_rbs_dl = 0.0;
    double ci_relative_error = 0.0;
    double max_t_fa_ms = 0.0;
    std::uint64_t t_fa_over_slot = 0;
    std::uint64_t replications = 0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t failed = 0;
    bool lloa_pass = false;
    bool hloa_pass = false;
    LatencyHistogram latency;

    /// Nearest-rank percentile with dropped packets as +inf.
    double latency_at_percentile(double q) const;
    /// Share of packets (dropped included) delivered within `budget_ms`.
    double fraction_within(double budget_ms) const;
};

/// One replication with its own seed stream. `packet_log` receives a per-leg
/// breakdown CSV (header included) when non-null.
ReplicationResult run_replication(const SimConfig& config, std::uint64_t seed, std::uint64_t index,
                                  std::ostream* packet_log = nullptr);

/// Pools replications: per-packet statistics, CI over replication means.
MetricsReport aggregate(const std::vector<ReplicationResult>& reps);

/// Replications until the 95% CI half-width / mean < target (at least
/// min_replications, at most max_replications). Independent of worker count.
MetricsReport run(const SimConfig& config, std::uint64_t seed);

Requirement check_requirement(const MetricsReport& report, Service service);

nlohmann::json report_to_json(const MetricsReport& r);
nlohmann::json config_to_json(const SimConfig& c);

}  // namespace nrlat
