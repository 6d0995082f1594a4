#include "nrlat/latency.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nrlat/errors.hpp"

namespace nrlat {

const char* to_string(Disposition d)
{
    switch (d) {
    case Disposition::Pending: return "pending";
    case Disposition::Delivered: return "delivered";
    case Disposition::Dropped: return "dropped_at_tx";
    case Disposition::DeliveryFailed: return "delivery_failed";
    }
    return "?";
}

std::optional<PacketStep> find_packet_step(const SlotGrid& grid, Tick ready, int n_rb, int repetitions,
                                           const ProcessingTimes& proc, Tick deadline)
{
    PacketStep s;
    s.t_p_tx = proc.tx_half();
    const Tick t = ready + s.t_p_tx;
    auto p = grid.find(n_rb, t, repetitions, deadline);
    if (!p || p->end > deadline) return std::nullopt;
    const Tick boundary = grid.next_start(t);
    s.placement = *p;
    s.t_fa = boundary - t;
    s.t_w = p->start - boundary;
    s.t_tt = p->first_end - p->start;
    s.t_rep = p->end - p->first_end;
    s.t_p_rx = proc.rx_half();
    return s;
}

LegProcess::LegProcess(const LegSpec& spec) : spec_(spec)
{
    if (spec.receivers < 1) throw std::invalid_argument("leg needs at least one receiver");
    bd_.direction = spec.direction;
    bd_.start = spec.start;
    cursor_ = spec.start;
    pending_.assign(static_cast<std::size_t>(spec.receivers), true);
}

std::int64_t LegProcess::rb_symbols() const
{
    std::int64_t a = 0;
    for (const auto& p : placements_) a += p.area();
    return a;
}

void LegProcess::finish(Disposition d)
{
    stage_ = Stage::Done;
    disposition_ = d;
    done_ = cursor_;
    bd_.total = cursor_ - spec_.start;
}

std::optional<Tick> LegProcess::begin_sched(LegEnv& env)
{
    if (env.control == nullptr) throw std::logic_error("dynamic scheduling needs a control plane");
    sched_acc_ = 0;
    if (spec_.direction == Direction::Uplink) {
        const ControlStep sr = env.control->sr_step(cursor_, uniform01(env.rng));
        sched_acc_ += sr.total();
        cursor_ += sr.total();
    }
    stage_ = Stage::Grant;
    // The DCI enters the queue after the gNB's processing half.
    return cursor_ + env.control->tx_half();
}

std::optional<Tick> LegProcess::advance(LegEnv& env, Tick now)
{
    (void)now;
    switch (stage_) {
    case Stage::Start:
        if (env.scheme.scheduling == Scheduling::Dynamic) return begin_sched(env);
        sched_acc_ = 0;
        data_ready_ = cursor_;
        stage_ = Stage::Data;
        return data_ready_ + env.proc.tx_half();

    case Stage::Grant: {
        // A request that cannot be granted before the deadline is discarded
        // without taking a PDCCH slot.
        if (cursor_ + env.control->peek_grant_step(cursor_).total() > spec_.deadline) {
            cursor_ += env.control->peek_grant_step(cursor_).total();
            finish(Disposition::Dropped);
            return std::nullopt;
        }
        const ControlStep g = env.control->grant_step(cursor_);
        sched_acc_ += g.total();
        cursor_ += g.total();
        if (cursor_ > spec_.deadline) {
            finish(Disposition::Dropped);
            return std::nullopt;
        }
        data_ready_ = cursor_;
        stage_ = Stage::Data;
        return data_ready_ + env.proc.tx_half();
    }

    case Stage::Data: {
        const int reps = env.scheme.repetitions();
        auto step = find_packet_step(env.grid, data_ready_, spec_.n_rb, reps, env.proc, spec_.deadline);
        if (!step) {
            finish(Disposition::Dropped);
            return std::nullopt;
        }
        env.grid.commit(spec_.owner, step->placement);
        placements_.push_back(step->placement);
        if (attempt_ == 0) {
            bd_.t_sch = sched_acc_;
            bd_.t_p_tx = step->t_p_tx;
            bd_.t_fa = step->t_fa;
            bd_.t_w = step->t_w;
            bd_.t_tt = step->t_tt;
            bd_.t_rep = step->t_rep;
            bd_.t_p_rx = step->t_p_rx;
        } else {
            bd_.t_retx_total += nack_acc_ + sched_acc_ + step->total();
        }
        bd_.n_attempts = attempt_ + 1;
        cursor_ = data_ready_ + step->total();

        // A receiver misses the attempt only if every copy fails.
        bool any_pending = false;
        for (int r = 0; r < spec_.receivers; ++r) {
            if (!pending_[r]) continue;
            bool failed = true;
            if (env.outcome != nullptr) {
                failed = (*env.outcome)(attempt_, r);
            } else {
                for (int c = 0; c < reps && failed; ++c) failed = uniform01(env.rng) < env.bler;
            }
            pending_[r] = failed;
            any_pending = any_pending || failed;
        }
        if (!any_pending) {
            finish(Disposition::Delivered);
            return std::nullopt;
        }
        if (attempt_ >= env.scheme.max_retx()) {
            finish(Disposition::DeliveryFailed);
            return std::nullopt;
        }
        if (env.control == nullptr) throw std::logic_error("HARQ needs a control plane");
        ++attempt_;
        const ControlStep nack = env.control->nack_step(spec_.direction, cursor_);
        nack_acc_ = nack.total();
        cursor_ += nack_acc_;
        return begin_sched(env);
    }

    case Stage::Done:
        break;
    }
    return std::nullopt;
}

void LegProcess::abort(SlotGrid& grid, Tick now)
{
    // Once the first copy is on air the leg runs to its end.
    if (transmitting(now)) return;
    if (stage_ == Stage::Done && disposition_ == Disposition::Dropped) return;
    for (const auto& p : placements_) grid.release(p);
    placements_.clear();
    cursor_ = std::max(spec_.start, now);
    finish(Disposition::Dropped);
}

LegProcess run_leg(const LegSpec& spec, LegEnv& env)
{
    LegProcess leg(spec);
    Tick now = spec.start;
    while (auto next = leg.advance(env, now)) now = *next;
    return leg;
}

LatencyBreakdown latency_semistatic(std::uint64_t owner, Direction direction, Tick ready, int n_rb, SlotGrid& grid,
                                    const ProcessingTimes& proc)
{
    SchemeConfig scheme;
    Rng rng(0);
    LegEnv env{grid, nullptr, scheme, proc, 0.0, rng, nullptr};
    return run_leg({owner, direction, ready, n_rb, 1, kNever}, env).breakdown();
}

LatencyBreakdown latency_dynamic(std::uint64_t owner, Direction direction, Tick ready, int n_rb, SlotGrid& grid,
                                 ControlPlane& control, const ProcessingTimes& proc, Rng& rng)
{
    SchemeConfig scheme;
    scheme.scheduling = Scheduling::Dynamic;
    LegEnv env{grid, &control, scheme, proc, 0.0, rng, nullptr};
    return run_leg({owner, direction, ready, n_rb, 1, kNever}, env).breakdown();
}

LatencyBreakdown apply_k_repetitions(LatencyBreakdown base, int k, Tick slot_ticks)
{
    if (k != 2 && k != 4 && k != 8) throw ConfigError("k must be 2, 4 or 8");
    base.t_rep += (k - 1) * slot_ticks;
    base.total += (k - 1) * slot_ticks;
    return base;
}

HarqResult apply_harq(const LatencyBreakdown& base, int n_rb, double bler, int max_n, Rng& rng, SlotGrid& grid,
                      ControlPlane& control, const ProcessingTimes& proc, const OutcomeFn* outcome)
{
    if (max_n < 1) throw ConfigError("HARQ needs max_n >= 1");
    HarqResult res;
    res.breakdown = base;
    res.breakdown.n_attempts = std::max(1, base.n_attempts);
    auto fails = [&](int attempt) { return outcome != nullptr ? (*outcome)(attempt, 0) : uniform01(rng) < bler; };

    Tick cursor = base.end();
    int attempt = 0;
    while (fails(attempt)) {
        if (attempt >= max_n) return res;
        ++attempt;
        Tick cycle = 0;
        const ControlStep nack = control.nack_step(base.direction, cursor);
        cycle += nack.total();
        const SchedLatency sch = base.direction == Direction::Uplink
                                     ? control.sched_ul(cursor + cycle, uniform01(rng))
                                     : control.sched_dl(cursor + cycle);
        cycle += sch.total();
        auto step = find_packet_step(grid, cursor + cycle, n_rb, 1, proc);
        grid.commit(0, step->placement);
        cycle += step->total();
        cursor += cycle;
        res.breakdown.t_retx_total += cycle;
        res.breakdown.total += cycle;
        res.breakdown.n_attempts += 1;
        res.n_retx = attempt;
    }
    res.delivered = true;
    return res;
}

Tick unicast_dl_latency(const std::vector<LatencyBreakdown>& per_receiver, int m)
{
    if (per_receiver.empty()) throw std::invalid_argument("unicast latency of an empty receiver set");
    if (static_cast<int>(per_receiver.size()) != m) throw std::invalid_argument("receiver count differs from M");
    Tick worst = 0;
    for (const auto& b : per_receiver) worst = std::max(worst, b.total);
    return worst;
}

double reliability_bound(double bler, const SchemeConfig& scheme)
{
    switch (scheme.retransmission) {
    case Retransmission::KRepetitions: return 1.0 - std::pow(bler, scheme.k);
    case Retransmission::Harq: return 1.0 - std::pow(bler, scheme.max_n + 1);
    case Retransmission::None: break;
    }
    return 1.0 - bler;
}

void write_breakdown_csv_header(std::ostream& os)
{
    os << "packet_id,direction,t_sch_ms,t_p_tx_ms,t_fa_ms,t_w_ms,t_tt_ms,t_p_rx_ms,t_rep_ms,t_retx_total_ms,"
          "n_attempts,total_ms,disposition\n";
}

void write_breakdown_csv_row(std::ostream& os, std::uint64_t packet_id, const LatencyBreakdown& b, Disposition d)
{
    os << packet_id << ',' << to_string(b.direction) << ',' << to_ms(b.t_sch) << ',' << to_ms(b.t_p_tx) << ','
       << to_ms(b.t_fa) << ',' << to_ms(b.t_w) << ',' << to_ms(b.t_tt) << ',' << to_ms(b.t_p_rx) << ','
       << to_ms(b.t_rep) << ',' << to_ms(b.t_retx_total) << ',' << b.n_attempts << ',' << to_ms(b.total) << ','
       << to_string(d) << '\n';
}

}  // namespace nrlat
