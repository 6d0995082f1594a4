#include "nrlat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nrlat/errors.hpp"

namespace nrlat {

const char* to_string(TrafficKind k) { return k == TrafficKind::Periodic ? "periodic" : "aperiodic"; }

TrafficKind traffic_kind_from_string(std::string_view s)
{
    if (s == "periodic") return TrafficKind::Periodic;
    if (s == "aperiodic") return TrafficKind::Aperiodic;
    throw ConfigError("unknown traffic '" + std::string(s) + "' (periodic, aperiodic)");
}

int vehicle_count(double density, int lanes, double cell_radius_m)
{
    if (!(density > 0.0) || lanes < 1 || !(cell_radius_m > 0.0)) {
        throw ConfigError("density, lanes and radius must be positive");
    }
    return static_cast<int>(std::lround(density * lanes * 2.0 * cell_radius_m / 1000.0));
}

std::vector<Vehicle> place_vehicles(double density, const LinkProfile& link, Rng& rng, int lanes,
                                    double cell_radius_m)
{
    const int n = vehicle_count(density, lanes, cell_radius_m);
    std::uniform_real_distribution<double> pos(-cell_radius_m, cell_radius_m);
    std::uniform_int_distribution<int> lane(1, lanes);
    std::vector<Vehicle> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& v = out[static_cast<std::size_t>(i)];
        v.id = i;
        v.position_m = pos(rng);
        v.lane = lane(rng);
        v.distance_m = std::min(std::abs(v.position_m), cell_radius_m);
        v.cqi = cqi_from_distance(v.distance_m, link);
    }
    return out;
}

Tick aperiodic_gap(double t_avg_ms, Rng& rng)
{
    std::exponential_distribution<double> e(2.0 / t_avg_ms);
    return from_ms(t_avg_ms / 2.0 + e(rng));
}

std::vector<std::vector<Tick>> generate_arrivals(const TrafficModel& model, int n_vehicles, Tick horizon, Rng& rng)
{
    if (horizon <= 0) throw ConfigError("horizon must be positive");
    if (!(model.period_ms > 0.0)) throw ConfigError("traffic period must be positive");
    std::vector<std::vector<Tick>> out(static_cast<std::size_t>(n_vehicles));
    const Tick period = from_ms(model.period_ms);
    std::uniform_int_distribution<Tick> phase(0, period - 1);
    for (auto& times : out) {
        Tick t = phase(rng);
        while (t < horizon) {
            times.push_back(t);
            t += model.kind == TrafficKind::Periodic ? period : aperiodic_gap(model.period_ms, rng);
        }
    }
    return out;
}

std::vector<std::vector<int>> nearest_neighbors(const std::vector<Vehicle>& vehicles, int m)
{
    const int n = static_cast<int>(vehicles.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vehicles[a].position_m != vehicles[b].position_m) return vehicles[a].position_m < vehicles[b].position_m;
        return vehicles[a].id < vehicles[b].id;
    });
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rank[order[i]] = i;

    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = vehicles[i].position_m;
        int lo = rank[i] - 1;
        int hi = rank[i] + 1;
        auto& nb = out[i];
        while (static_cast<int>(nb.size()) < m && (lo >= 0 || hi < n)) {
            bool take_lo;
            if (lo < 0) {
                take_lo = false;
            } else if (hi >= n) {
                take_lo = true;
            } else {
                const double dl = x - vehicles[order[lo]].position_m;
                const double dh = vehicles[order[hi]].position_m - x;
                take_lo = dl < dh || (dl == dh && vehicles[order[lo]].id < vehicles[order[hi]].id);
            }
            nb.push_back(take_lo ? order[lo--] : order[hi++]);
        }
    }
    return out;
}

std::optional<StaleOutcome> drop_stale(VehicleQueue& queue, std::uint64_t new_packet, Tick arrival)
{
    std::optional<StaleOutcome> prev;
    if (queue.pending) prev = StaleOutcome{*queue.pending, queue.pending_tx_end > arrival};
    queue.pending = new_packet;
    queue.pending_tx_end = kNever;
    return prev;
}

nlohmann::json scenario_to_json(const ScenarioDump& s)
{
    nlohmann::json j;
    j["vehicles"] = nlohmann::json::array();
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
        const auto& v = s.vehicles[i];
        nlohmann::json a = nlohmann::json::array();
        if (i < s.arrivals.size()) {
            for (Tick t : s.arrivals[i]) a.push_back(t);
        }
        j["vehicles"].push_back({{"id", v.id},
                                 {"lane", v.lane},
                                 {"position_m", v.position_m},
                                 {"distance_m", v.distance_m},
                                 {"cqi", v.cqi},
                                 {"arrivals_ticks", a}});
    }
    j["ticks_per_ms"] = kTicksPerMs;
    return j;
}

ScenarioDump scenario_from_json(const nlohmann::json& j)
{
    if (j.value("ticks_per_ms", kTicksPerMs) != kTicksPerMs) throw ConfigError("scenario uses a different tick");
    ScenarioDump s;
    for (const auto& e : j.at("vehicles")) {
        Vehicle v;
        v.id = e.at("id").get<int>();
        v.lane = e.at("lane").get<int>();
        v.position_m = e.at("position_m").get<double>();
        v.distance_m = e.at("distance_m").get<double>();
        v.cqi = e.at("cqi").get<int>();
        s.vehicles.push_back(v);
        s.arrivals.push_back(e.at("arrivals_ticks").get<std::vector<Tick>>());
    }
    return s;
}

}  // namespace nrlat
