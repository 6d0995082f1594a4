#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nrlat/link.hpp"
#include "nrlat/random.hpp"
#include "nrlat/units.hpp"

namespace nrlat {

struct Vehicle {
    int id = 0;
    int lane = 1;               ///< 1..lanes
    double position_m = 0.0;    ///< Along the road, gNB at 0.
    double distance_m = 0.0;    ///< To the gNB.
    int cqi = 0;
};

enum class TrafficKind { Periodic, Aperiodic };
const char* to_string(TrafficKind k);
TrafficKind traffic_kind_from_string(std::string_view s);

struct TrafficModel {
    TrafficKind kind = TrafficKind::Periodic;
    double period_ms = 100.0;  ///< T_p, or T_avg for aperiodic traffic.
    int packet_bytes = 300;

    bool operator==(const TrafficModel&) const = default;
};

/// round(density × lanes × 2·radius / 1000)
int vehicle_count(double density_veh_per_km_per_lane, int lanes = 6, double cell_radius_m = kCellRadiusM);

/// Uniform positions on [-radius, radius]; the gNB sits at the midpoint.
std::vector<Vehicle> place_vehicles(double density_veh_per_km_per_lane, const LinkProfile& link, Rng& rng,
                                    int lanes = 6, double cell_radius_m = kCellRadiusM);

/// ΔT_a = T_avg/2 + Exp(mean T_avg/2).
Tick aperiodic_gap(double t_avg_ms, Rng& rng);

/// Packet generation times in [0, horizon) per vehicle. Periodic traffic uses
/// a random phase in [0, T_p); aperiodic traffic starts at a uniform offset in
/// [0, T_avg) and then follows ΔT_a.
std::vector<std::vector<Tick>> generate_arrivals(const TrafficModel& model, int n_vehicles, Tick horizon, Rng& rng);

/// The m vehicles closest to each vehicle (excluding itself), nearest first,
/// ties broken by id. Fewer if the population is smaller.
std::vector<std::vector<int>> nearest_neighbors(const std::vector<Vehicle>& vehicles, int m);

/// One vehicle's UL buffer: at most one packet waiting for transmission.
struct VehicleQueue {
    std::optional<std::uint64_t> pending;
    Tick pending_tx_end = kNever;  ///< End of the pending packet's UL transmission, if known.
};

struct StaleOutcome {
    std::uint64_t packet = 0;
    bool dropped = false;
};

/// Installs `new_packet` generated at `arrival`. A previous packet whose UL
/// transmission has not ended by `arrival` is dropped.
std::optional<StaleOutcome> drop_stale(VehicleQueue& queue, std::uint64_t new_packet, Tick arrival);

struct ScenarioDump {
    std::vector<Vehicle> vehicles;
    std::vector<std::vector<Tick>> arrivals;
};

nlohmann::json scenario_to_json(const ScenarioDump& s);
ScenarioDump scenario_from_json(const nlohmann::json& j);

}  // namespace nrlat
