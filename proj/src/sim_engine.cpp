#include "nrlat/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <queue>
#include <thread>

#include "nrlat/errors.hpp"

namespace nrlat {

const char* to_string(Service s) { return s == Service::LLoA ? "LLoA" : "HLoA"; }

ControlConfig SimConfig::control() const
{
    const auto num = numerology();
    return ControlConfig::derive(control_variant, control_baseline ? *control_baseline : ControlConfig::conf1(num));
}

LinkProfile SimConfig::link() const
{
    return cqi_map ? LinkProfile::with_map(scheme.mcs_table, *cqi_map) : LinkProfile::make(scheme.mcs_table);
}

int SimConfig::total_rbs() const { return PhyTables::standard().total_rbs(bw_mhz, scs_khz); }

namespace {

// RBs per CQI for one grid; -1 where the CQI has no usable MCS.
std::vector<int> rb_table(const SimConfig& c, const SlotGrid& grid, bool strict)
{
    std::vector<int> out(16, -1);
    const long bits = 8L * c.traffic.packet_bytes;
    for (int cqi = 1; cqi <= 15; ++cqi) {
        const McsEntry* mcs = nullptr;
        try {
            mcs = &mcs_from_cqi(cqi, c.scheme.mcs_table);
        } catch (const NoTransmission&) {
            continue;
        }
        try {
            out[cqi] = rbs_for_packet(bits, *mcs, grid.transmission_symbols(), c.layers, c.overhead_re_per_rb,
                                      grid.max_rbs());
        } catch (const InfeasibleAllocation&) {
            if (strict) throw;
        }
    }
    return out;
}

}  // namespace

void SimConfig::validate() const
{
    scheme.validate();
    const auto num = numerology();
    const int n_rb = total_rbs();
    const ControlConfig ctrl = control();
    ctrl.validate(num, n_rb);
    const LinkProfile lp = link();
    if (!(density > 0.0)) throw ConfigError("density must be positive");
    if (!(horizon_ms > warmup_ms) || warmup_ms < 0.0) throw ConfigError("need 0 <= warmup < horizon");
    if (min_replications < 1 || max_replications < min_replications) {
        throw ConfigError("need 1 <= min_replications <= max_replications");
    }
    if (traffic.packet_bytes < 1) throw ConfigError("packet size must be positive");
    if (layers < 1 || layers > 2) throw ConfigError("layers must be 1 or 2");

    for (Direction d : {Direction::Uplink, Direction::Downlink}) {
        SlotGrid grid(num, d, n_rb, ctrl, scheme.slot_type);
        const auto rbs = rb_table(*this, grid, false);
        for (const auto& e : lp.cqi_map) {
            if (e.cqi < 1 || rbs[e.cqi] < 0) {
                // Distinguish an unusable CQI from a packet wider than the carrier.
                try {
                    (void)mcs_from_cqi(e.cqi, scheme.mcs_table);
                } catch (const NoTransmission& ex) {
                    throw NoTransmission(std::string("CQI map entry up to ") +
                                         std::to_string(e.distance_upper_bound_m) + " m: " + ex.what());
                }
                const auto& mcs = mcs_from_cqi(e.cqi, scheme.mcs_table);
                const int need = rbs_for_packet(8L * traffic.packet_bytes, mcs, grid.transmission_symbols(), layers,
                                                overhead_re_per_rb, kMaxRbs);
                throw InfeasibleAllocation(
                    std::string(to_string(d)) + " " + to_string(scheme.slot_type) + " at " + std::to_string(scs_khz) +
                    " kHz / " + std::to_string(bw_mhz) + " MHz: CQI " + std::to_string(e.cqi) + " (" +
                    to_string(scheme.mcs_table) + " MCS " + std::to_string(mcs.index) + ") needs " +
                    std::to_string(need) + " RBs x " + std::to_string(grid.transmission_symbols()) +
                    " symbols, grid offers " + std::to_string(grid.max_rbs()));
            }
        }
    }
}

namespace {

struct Event {
    Tick time;
    std::uint64_t seq;
    enum Kind : std::uint8_t { Arrival, LegStep, DlStart, Settle } kind;
    std::uint32_t a;
    std::uint32_t b;

    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

struct Packet {
    std::uint32_t vehicle = 0;
    Tick gen = 0;
    bool counted = false;
    bool done = false;
    int ul_leg = -1;
    std::vector<int> dl_legs;
    int dl_open = 0;
    Disposition ul_disp = Disposition::Pending;
    Tick ul_done = 0;
    Tick dl_done = 0;
    bool dl_dropped = false;
    bool dl_failed = false;
};

class Replication {
  public:
    Replication(const SimConfig& c, std::uint64_t seed, std::uint64_t index, std::ostream* log)
        : c_(c), num_(c.numerology()), ctrl_(c.control()), link_(c.link()),
          proc_(PhyTables::standard().processing_times(num_.mu(), c.ue_capability)), rng_(make_rng(seed, index)),
          ul_(num_, Direction::Uplink, c.total_rbs(), ctrl_, c.scheme.slot_type),
          dl_(num_, Direction::Downlink, c.total_rbs(), ctrl_, c.scheme.slot_type), log_(log)
    {
        res_.index = index;
        warmup_ = from_ms(c.warmup_ms);
        horizon_ = from_ms(c.horizon_ms);
        vehicles_ = place_vehicles(c.density, link_, rng_, c.lanes);
        // Keep generating a little past the horizon so late packets see steady load.
        const Tick tail = from_ms(2.0 * c.traffic.period_ms);
        arrivals_ = generate_arrivals(c.traffic, static_cast<int>(vehicles_.size()), horizon_ + tail, rng_);
        neighbors_ = nearest_neighbors(vehicles_, c.scheme.m);
        control_.emplace(num_, ctrl_, proc_, static_cast<int>(vehicles_.size()));
        ul_rbs_ = rb_table(c, ul_, false);
        dl_rbs_ = rb_table(c, dl_, false);
        last_dl_packet_.assign(vehicles_.size(), -1);
        bler_ = target_bler(c.scheme.mcs_table);
    }

    ReplicationResult run()
    {
        if (log_ != nullptr) write_breakdown_csv_header(*log_);
        for (std::uint32_t v = 0; v < vehicles_.size(); ++v) {
            if (!arrivals_[v].empty()) push(arrivals_[v][0], Event::Arrival, v, 0);
        }
        Tick released = 0;
        while (!events_.empty()) {
            const Event e = events_.top();
            events_.pop();
            if (e.time - released > 64 * num_.slot_ticks()) {
                ul_.release_expired(e.time);
                dl_.release_expired(e.time);
                released = e.time;
            }
            switch (e.kind) {
            case Event::Arrival: on_arrival(e.time, e.a, e.b); break;
            case Event::LegStep: step_leg(e.time, static_cast<int>(e.a), e.b); break;
            case Event::DlStart: on_dl_start(e.time, e.a); break;
            case Event::Settle: settle(e.time, static_cast<int>(e.a), e.b); break;
            }
        }
        auto [un, ud] = ul_.utilization_terms(warmup_, horizon_);
        auto [dn, dd] = dl_.utilization_terms(warmup_, horizon_);
        res_.util_ul_num = un;
        res_.util_ul_den = ud;
        res_.util_dl_num = dn;
        res_.util_dl_den = dd;
        res_.mean_ms = res_.latency.mean_ms();
        return std::move(res_);
    }

  private:
    void push(Tick t, Event::Kind k, std::uint32_t a, std::uint32_t b = 0) { events_.push({t, seq_++, k, a, b}); }

    LegEnv env(SlotGrid& grid) { return LegEnv{grid, &*control_, c_.scheme, proc_, bler_, rng_, nullptr}; }

    int new_leg(const LegSpec& spec)
    {
        if (!free_legs_.empty()) {
            const int i = free_legs_.back();
            free_legs_.pop_back();
            legs_[i].emplace(spec);
            ++leg_gen_[i];
            settled_[i] = false;
            return i;
        }
        legs_.emplace_back(std::in_place, spec);
        leg_gen_.push_back(0);
        settled_.push_back(false);
        return static_cast<int>(legs_.size()) - 1;
    }

    void start_leg(Tick now, int l)
    {
        ++res_.legs;
        step_leg(now, l, leg_gen_[l]);
    }

    void step_leg(Tick now, int l, std::uint32_t gen)
    {
        // The leg may have been aborted, or its slot recycled, while the event was pending.
        if (!legs_[l] || leg_gen_[l] != gen) return;
        LegProcess& leg = *legs_[l];
        if (leg.finished()) return;
        SlotGrid& grid = leg.spec().direction == Direction::Uplink ? ul_ : dl_;
        LegEnv e = env(grid);
        if (auto next = leg.advance(e, now)) {
            push(*next, Event::LegStep, static_cast<std::uint32_t>(l), gen);
        } else if (leg.spec().direction == Direction::Downlink && !leg.transmitting(now)) {
            // Booked but not yet on air: a newer update may still cancel it.
            push(leg.placements().empty() ? now : leg.placements().front().start, Event::Settle,
                 static_cast<std::uint32_t>(l), gen);
        } else {
            on_leg_finished(now, l);
        }
    }

    void settle(Tick now, int l, std::uint32_t gen)
    {
        if (!legs_[l] || leg_gen_[l] != gen || settled_[l]) return;
        on_leg_finished(now, l);
    }

    void on_arrival(Tick now, std::uint32_t v, std::uint32_t i)
    {
        const auto& times = arrivals_[v];
        const Tick next = i + 1 < times.size() ? times[i + 1] : kNever;
        if (i + 1 < times.size()) push(next, Event::Arrival, v, i + 1);

        const auto pid = static_cast<std::uint32_t>(packets_.size());
        Packet p;
        p.vehicle = v;
        p.gen = now;
        p.counted = now >= warmup_ && now < horizon_;
        packets_.push_back(p);
        if (p.counted) ++res_.generated;

        LegSpec spec{pid, Direction::Uplink, now, ul_rbs_[vehicles_[v].cqi], 1, next};
        const int l = new_leg(spec);
        packets_[pid].ul_leg = l;
        start_leg(now, l);
    }

    void on_leg_finished(Tick now, int l)
    {
        LegProcess& leg = *legs_[l];
        settled_[l] = true;
        const auto pid = static_cast<std::uint32_t>(leg.spec().owner);
        Packet& p = packets_[pid];
        if (p.counted && !leg.placements().empty()) {
            const Tick fa = leg.breakdown().t_fa;
            res_.max_t_fa = std::max(res_.max_t_fa, fa);
            if (fa > num_.slot_ticks()) ++res_.t_fa_over_slot;
            if (leg.spec().direction == Direction::Uplink) {
                res_.rb_ul_sum += leg.spec().n_rb;
                ++res_.rb_ul_n;
            } else {
                res_.rb_dl_sum += leg.spec().n_rb;
                ++res_.rb_dl_n;
            }
        }
        if (p.counted && log_ != nullptr) write_breakdown_csv_row(*log_, pid, leg.breakdown(), leg.disposition());

        if (leg.spec().direction == Direction::Uplink) {
            p.ul_disp = leg.disposition();
            p.ul_done = leg.done_time();
            if (p.ul_disp == Disposition::Delivered) {
                push(p.ul_done, Event::DlStart, pid);
            } else {
                finalize(pid);
            }
        } else {
            if (leg.disposition() == Disposition::Dropped) p.dl_dropped = true;
            if (leg.disposition() == Disposition::DeliveryFailed) p.dl_failed = true;
            p.dl_done = std::max(p.dl_done, leg.done_time());
            if (--p.dl_open == 0) finalize(pid);
        }
        (void)now;
    }

    void on_dl_start(Tick now, std::uint32_t pid)
    {
        const std::uint32_t v = packets_[pid].vehicle;
        // A newer update from the same source supersedes DL copies not yet on air.
        const std::int64_t prev = last_dl_packet_[v];
        if (prev >= 0 && !packets_[prev].done) {
            const std::vector<int> old = packets_[prev].dl_legs;
            for (int l : old) {
                if (!legs_[l]) continue;
                LegProcess& leg = *legs_[l];
                if (!settled_[l] && !leg.transmitting(now)) {
                    leg.abort(dl_, now);
                    on_leg_finished(now, l);
                }
            }
        }
        last_dl_packet_[v] = pid;

        const auto& nb = neighbors_[v];
        std::vector<int> receivers(nb.begin(), nb.end());
        if (receivers.empty()) receivers.push_back(static_cast<int>(v));
        std::vector<int> new_legs;
        if (c_.scheme.dl_cast == Cast::Broadcast) {
            int worst = 15;
            for (int r : receivers) worst = std::min(worst, vehicles_[r].cqi);
            new_legs.push_back(new_leg({pid, Direction::Downlink, now, dl_rbs_[worst],
                                        static_cast<int>(receivers.size()), kNever}));
        } else {
            for (int r : receivers) {
                new_legs.push_back(new_leg({pid, Direction::Downlink, now, dl_rbs_[vehicles_[r].cqi], 1, kNever}));
            }
        }
        Packet& p = packets_[pid];
        p.dl_legs = new_legs;
        p.dl_open = static_cast<int>(new_legs.size());
        p.dl_done = now;
        for (int l : new_legs) start_leg(now, l);
    }

    void finalize(std::uint32_t pid)
    {
        Packet& p = packets_[pid];
        p.done = true;
        if (p.counted) {
            if (p.ul_disp == Disposition::Dropped || p.dl_dropped) {
                ++res_.dropped;
                res_.latency.add_infinite();
            } else if (p.ul_disp == Disposition::DeliveryFailed || p.dl_failed) {
                ++res_.failed;
            } else {
                ++res_.delivered;
                res_.latency.add(p.dl_done - p.gen);
                res_.ul_sum_ms += to_ms(p.ul_done - p.gen);
                res_.dl_sum_ms += to_ms(p.dl_done - p.ul_done);
            }
        }
        // Recycle legs once the whole packet is settled.
        if (p.ul_leg >= 0) release_leg(p.ul_leg);
        for (int l : p.dl_legs) release_leg(l);
        p.ul_leg = -1;
        p.dl_legs.clear();
        p.dl_legs.shrink_to_fit();
    }

    void release_leg(int l)
    {
        legs_[l].reset();
        free_legs_.push_back(l);
    }

    const SimConfig& c_;
    NumerologyProfile num_;
    ControlConfig ctrl_;
    LinkProfile link_;
    ProcessingTimes proc_;
    Rng rng_;
    SlotGrid ul_;
    SlotGrid dl_;
    std::optional<ControlPlane> control_;
    std::ostream* log_;
    double bler_ = 0.0;
    Tick warmup_ = 0;
    Tick horizon_ = 0;

    std::vector<Vehicle> vehicles_;
    std::vector<std::vector<Tick>> arrivals_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<int> ul_rbs_, dl_rbs_;
    std::vector<std::int64_t> last_dl_packet_;

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::uint64_t seq_ = 0;
    std::vector<Packet> packets_;
    std::vector<std::optional<LegProcess>> legs_;
    std::vector<std::uint32_t> leg_gen_;
    std::vector<bool> settled_;
    std::vector<int> free_legs_;
    ReplicationResult res_;
};

}  // namespace

ReplicationResult run_replication(const SimConfig& config, std::uint64_t seed, std::uint64_t index,
                                  std::ostream* packet_log)
{
    config.validate();
    Replication rep(config, seed, index, packet_log);
    return rep.run();
}

double MetricsReport::latency_at_percentile(double q) const
{
    const Tick t = latency.quantile(q);
    return t >= kNever ? std::numeric_limits<double>::infinity() : to_ms(t);
}

double MetricsReport::fraction_within(double budget_ms) const
{
    const std::uint64_t n = latency.count();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(latency.count_at_most(from_ms(budget_ms))) / static_cast<double>(n);
}

MetricsReport aggregate(const std::vector<ReplicationResult>& reps)
{
    if (reps.empty()) throw std::invalid_argument("aggregate needs at least one replication");
    MetricsReport r;
    std::vector<double> means;
    long double ul = 0, dl = 0;
    std::int64_t un = 0, ud = 0, dn = 0, dd = 0;
    std::uint64_t rbu = 0, rbun = 0, rbd = 0, rbdn = 0;
    for (const auto& x : reps) {
        r.latency.merge(x.latency);
        r.generated += x.generated;
        r.delivered += x.delivered;
        r.dropped += x.dropped;
        r.failed += x.failed;
        ul += x.ul_sum_ms;
        dl += x.dl_sum_ms;
        un += x.util_ul_num;
        ud += x.util_ul_den;
        dn += x.util_dl_num;
        dd += x.util_dl_den;
        rbu += x.rb_ul_sum;
        rbun += x.rb_ul_n;
        rbd += x.rb_dl_sum;
        rbdn += x.rb_dl_n;
        r.max_t_fa_ms = std::max(r.max_t_fa_ms, to_ms(x.max_t_fa));
        r.t_fa_over_slot += x.t_fa_over_slot;
        if (x.delivered > 0) means.push_back(x.mean_ms);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.replications = reps.size();
    r.mean_l_radio_ms = r.latency.mean_ms();
    r.mean_ul_ms = r.delivered ? static_cast<double>(ul / r.delivered) : nan;
    r.mean_dl_ms = r.delivered ? static_cast<double>(dl / r.delivered) : nan;
    r.p90_ms = r.latency_at_percentile(0.90);
    r.p9999_ms = r.latency_at_percentile(0.9999);
    const std::uint64_t population = r.generated - r.failed;
    r.drop_fraction = population ? static_cast<double>(r.dropped) / population : 0.0;
    r.delivery_failure_fraction = r.generated ? static_cast<double>(r.failed) / r.generated : 0.0;
    r.rb_utilization_ul = ud ? static_cast<double>(un) / ud : 0.0;
    r.rb_utilization_dl = dd ? static_cast<double>(dn) / dd : 0.0;
    r.mean_rbs_ul = rbun ? static_cast<double>(rbu) / rbun : nan;
    r.mean_rbs_dl = rbdn ? static_cast<double>(rbd) / rbdn : nan;
    r.ci_relative_error = means.size() >= 2 ? confidence_interval(means).relative_error()
                                            : std::numeric_limits<double>::infinity();
    r.lloa_pass = check_requirement(r, Service::LLoA).pass;
    r.hloa_pass = check_requirement(r, Service::HLoA).pass;
    return r;
}

MetricsReport run(const SimConfig& config, std::uint64_t seed)
{
    config.validate();
    std::vector<ReplicationResult> reps;
    std::vector<double> means;
    const int workers = std::max(1, config.workers);
    auto converged = [&] {
        if (static_cast<int>(reps.size()) < config.min_replications) return false;
        if (means.size() < 2) return false;
        return confidence_interval(means).relative_error() < config.target_relative_error;
    };
    while (static_cast<int>(reps.size()) < config.max_replications) {
        const int first = static_cast<int>(reps.size());
        const int batch = std::min(workers, config.max_replications - first);
        std::vector<ReplicationResult> out(static_cast<std::size_t>(batch));
        if (batch == 1) {
            out[0] = run_replication(config, seed, first);
        } else {
            std::vector<std::thread> pool;
            std::exception_ptr err;
            std::mutex m;
            for (int i = 0; i < batch; ++i) {
                pool.emplace_back([&, i] {
                    try {
                        out[i] = run_replication(config, seed, first + i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(m);
                        if (!err) err = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            if (err) std::rethrow_exception(err);
        }
        // Consume in index order so the stopping point never depends on the batch size.
        bool stop = false;
        for (auto& r : out) {
            if (r.delivered > 0) means.push_back(r.mean_ms);
            reps.push_back(std::move(r));
            if (converged()) {
                stop = true;
                break;
            }
        }
        if (stop) break;
    }
    return aggregate(reps);
}

Requirement check_requirement(const MetricsReport& report, Service service)
{
    Requirement q;
    q.quantile = service == Service::LLoA ? 0.90 : 0.9999;
    q.budget_ms = service == Service::LLoA ? 23.0 : 6.0;
    q.latency_ms = report.latency_at_percentile(q.quantile);
    q.pass = q.latency_ms <= q.budget_ms;
    q.margin_ms = q.budget_ms - q.latency_ms;
    return q;
}

namespace {

nlohmann::json finite_or_null(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json report_to_json(const MetricsReport& r)
{
    return {{"mean_l_radio_ms", finite_or_null(r.mean_l_radio_ms)},
            {"mean_ul_ms", finite_or_null(r.mean_ul_ms)},
            {"mean_dl_ms", finite_or_null(r.mean_dl_ms)},
            {"p90_ms", finite_or_null(r.p90_ms)},
            {"p9999_ms", finite_or_null(r.p9999_ms)},
            {"drop_fraction", r.drop_fraction},
            {"delivery_failure_fraction", r.delivery_failure_fraction},
            {"rb_utilization_ul", r.rb_utilization_ul},
            {"rb_utilization_dl", r.rb_utilization_dl},
            {"mean_rbs_ul", finite_or_null(r.mean_rbs_ul)},
            {"mean_rbs_dl", finite_or_null(r.mean_rbs_dl)},
            {"ci_relative_error", finite_or_null(r.ci_relative_error)},
            {"max_t_fa_ms", r.max_t_fa_ms},
            {"t_fa_over_slot", r.t_fa_over_slot},
            {"replications", r.replications},
            {"generated", r.generated},
            {"delivered", r.delivered},
            {"dropped", r.dropped},
            {"delivery_failed", r.failed},
            {"lloa_pass", r.lloa_pass},
            {"hloa_pass", r.hloa_pass}};
}

nlohmann::json config_to_json(const SimConfig& c)
{
    const ControlConfig ctrl = c.control();
    nlohmann::json j = {
        {"scheduling", to_string(c.scheme.scheduling)},
        {"retransmission", to_string(c.scheme.retransmission)},
        {"k", c.scheme.k},
        {"max_n", c.scheme.max_n},
        {"cast", to_string(c.scheme.dl_cast)},
        {"m", c.scheme.m},
        {"slot_type", to_string(c.scheme.slot_type)},
        {"mcs_table", to_string(c.scheme.mcs_table)},
        {"scs_khz", c.scs_khz},
        {"cp", to_string(c.numerology().cp())},
        {"bw_mhz", c.bw_mhz},
        {"n_rb", c.total_rbs()},
        {"density", c.density},
        {"lanes", c.lanes},
        {"traffic", to_string(c.traffic.kind)},
        {"period_ms", c.traffic.period_ms},
        {"packet_bytes", c.traffic.packet_bytes},
        {"control_variant", to_string(c.control_variant)},
        {"n_rb_pdcch", ctrl.n_rb_pdcch},
        {"n_sy_pdcch", ctrl.n_sy_pdcch},
        {"n_rb_pucch", ctrl.n_rb_pucch},
        {"n_sy_pucch", ctrl.n_sy_pucch},
        {"ue_capability", c.ue_capability},
        {"layers", c.layers},
        {"overhead_re_per_rb", c.overhead_re_per_rb},
        {"warmup_ms", c.warmup_ms},
        {"horizon_ms", c.horizon_ms},
        {"min_replications", c.min_replications},
        {"max_replications", c.max_replications},
        {"target_relative_error", c.target_relative_error},
    };
    nlohmann::json map = nlohmann::json::array();
    for (const auto& e : c.link().cqi_map) map.push_back({e.distance_upper_bound_m, e.cqi});
    j["cqi_map"] = map;
    return j;
}

}  // namespace nrlat
