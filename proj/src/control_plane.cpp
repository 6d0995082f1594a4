#include "nrlat/control_plane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nrlat/errors.hpp"

namespace nrlat {

SrConfig SrConfig::make(const ControlConfig& control, int n_ue)
{
    SrConfig s;
    s.r_sr = std::max(1, control.sr_per_slot());
    s.n_slots_sr = control.ideal() ? 1 : std::max<int>(1, static_cast<int>(ceil_div(std::max(n_ue, 1), s.r_sr)));
    return s;
}

Tick sr_wait(double p, const SrConfig& sr, Tick slot_ticks)
{
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sr_wait: p outside [0,1]");
    if (p == 0.0) return 0;
    const auto k = static_cast<Tick>(std::ceil(p * sr.n_slots_sr)) - 1;
    return slot_ticks * std::max<Tick>(0, k);
}

DciQueue::DciQueue(const NumerologyProfile& numerology, const ControlConfig& control)
    : numerology_(numerology), capacity_(control.dci_per_slot()), ideal_(control.ideal())
{
    if (capacity_ < 1) throw ConfigError("PDCCH reservation holds no DCI");
}

DciQueue::Slotting DciQueue::peek(Tick arrival) const
{
    Slotting s;
    s.occasion_slot = ceil_div(arrival, numerology_.slot_ticks());
    s.drain_slot = s.occasion_slot;
    if (ideal_) return s;
    if (tail_slot_ > s.drain_slot) s.drain_slot = tail_slot_;
    if (s.drain_slot == tail_slot_ && tail_used_ >= capacity_) ++s.drain_slot;
    return s;
}

DciQueue::Slotting DciQueue::push(Tick arrival)
{
    if (arrival < last_arrival_) {
        throw std::logic_error("DCI arrivals must be non-decreasing (" + std::to_string(arrival) + " < " +
                               std::to_string(last_arrival_) + ")");
    }
    last_arrival_ = arrival;
    Slotting s = peek(arrival);
    ++pushed_;
    if (ideal_) return s;
    if (s.drain_slot != tail_slot_) {
        tail_slot_ = s.drain_slot;
        tail_used_ = 0;
    }
    ++tail_used_;
    return s;
}

int DciQueue::backlog_at(Tick arrival) const
{
    if (ideal_) return 0;
    const Slotting s = peek(arrival);
    if (s.drain_slot != tail_slot_) return 0;
    return tail_used_;
}

Tick pdcch_queue_delay(Tick arrival, DciQueue& queue, const NumerologyProfile& numerology)
{
    return numerology.slot_start(queue.push(arrival).drain_slot) - arrival;
}

ControlPlane::ControlPlane(const NumerologyProfile& numerology, const ControlConfig& control,
                           const ProcessingTimes& proc, int n_ue)
    : numerology_(numerology), control_(control), proc_(proc), sr_(SrConfig::make(control, n_ue)),
      dci_(numerology, control)
{
}

Tick ControlPlane::next_pdcch(Tick t) const { return numerology_.slot_start(ceil_div(t, numerology_.slot_ticks())); }

Tick ControlPlane::next_pucch(Tick t) const
{
    const Tick offset = (numerology_.symbols_per_slot() - control_.n_sy_pucch) * numerology_.symbol_ticks();
    return numerology_.slot_start(ceil_div(t - offset, numerology_.slot_ticks())) + offset;
}

ControlStep ControlPlane::sr_step(Tick ready, double p) const
{
    ControlStep s;
    s.t_p_tx = tx_half();
    const Tick t = ready + s.t_p_tx;
    s.t_fa = next_pucch(t) - t;
    s.t_wait = sr_wait(p, sr_, numerology_.slot_ticks());
    s.t_tt = pucch_tt();
    s.t_p_rx = rx_half();
    return s;
}

ControlStep ControlPlane::grant_from(Tick ready, const DciQueue::Slotting& q) const
{
    ControlStep s;
    s.t_p_tx = tx_half();
    const Tick arrival = ready + s.t_p_tx;
    s.t_fa = numerology_.slot_start(q.occasion_slot) - arrival;
    s.t_wait = numerology_.slot_start(q.drain_slot) - numerology_.slot_start(q.occasion_slot);
    s.t_tt = pdcch_tt();
    s.t_p_rx = rx_half();
    return s;
}

ControlStep ControlPlane::grant_step(Tick ready) { return grant_from(ready, dci_.push(ready + tx_half())); }

ControlStep ControlPlane::peek_grant_step(Tick ready) const { return grant_from(ready, dci_.peek(ready + tx_half())); }

ControlStep ControlPlane::nack_step(Direction data_direction, Tick ready) const
{
    ControlStep s;
    s.t_p_tx = tx_half();
    const Tick t = ready + s.t_p_tx;
    if (data_direction == Direction::Uplink) {
        s.t_fa = next_pucch(t) - t;
        s.t_tt = pucch_tt();
    } else {
        s.t_fa = next_pdcch(t) - t;
        s.t_tt = pdcch_tt();
    }
    s.t_p_rx = rx_half();
    return s;
}

SchedLatency ControlPlane::sched_dl(Tick ready)
{
    SchedLatency l;
    l.grant = grant_step(ready);
    return l;
}

SchedLatency ControlPlane::sched_ul(Tick ready, double p)
{
    SchedLatency l;
    l.has_sr = true;
    l.sr = sr_step(ready, p);
    l.grant = grant_step(ready + l.sr.total());
    return l;
}

}  // namespace nrlat
