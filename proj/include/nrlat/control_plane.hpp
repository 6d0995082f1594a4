#pragma once

#include <cstdint>

#include "nrlat/control_config.hpp"
#include "nrlat/phy.hpp"
#include "nrlat/units.hpp"

namespace nrlat {

/// SR multiplexing on PUCCH format 0: r_sr UEs per slot, so a UE's SR
/// opportunity recurs every n_slots_sr slots.
struct SrConfig {
    int r_sr = 1;
    int n_slots_sr = 1;

    /// Conf3 (ideal control) always gets n_slots_sr = 1.
    static SrConfig make(const ControlConfig& control, int n_ue);
};

/// Wait for the UE's SR opportunity: 0 if p == 0, else
/// slot * (ceil(p * n_slots_sr) - 1).
Tick sr_wait(double p, const SrConfig& sr, Tick slot_ticks);

/// FIFO of DCIs drained on PDCCH at most capacity() per slot.
///
/// Arrivals must be non-decreasing. A DCI rides the first PDCCH that starts
/// at or after its arrival, or a later one if that PDCCH is already full.
/// Under conf3 every DCI rides the first PDCCH.
class DciQueue {
  public:
    DciQueue(const NumerologyProfile& numerology, const ControlConfig& control);

    struct Slotting {
        std::int64_t occasion_slot = 0;  ///< First PDCCH at or after arrival.
        std::int64_t drain_slot = 0;     ///< PDCCH that carries the DCI.
    };

    Slotting peek(Tick arrival) const;
    /// Enqueues a DCI. Throws std::logic_error on a decreasing arrival.
    Slotting push(Tick arrival);

    int capacity() const { return capacity_; }
    bool ideal() const { return ideal_; }
    std::uint64_t pushed() const { return pushed_; }

    /// DCIs already scheduled on the drain slot's PDCCH ahead of a message
    /// arriving now (0 under conf3).
    int backlog_at(Tick arrival) const;

  private:
    NumerologyProfile numerology_;
    int capacity_;
    bool ideal_;
    std::int64_t tail_slot_ = -1;
    int tail_used_ = 0;
    Tick last_arrival_ = 0;
    std::uint64_t pushed_ = 0;
};

/// Time from arrival to the start of the PDCCH that carries the DCI (t_fa + t_q).
Tick pdcch_queue_delay(Tick arrival, DciQueue& queue, const NumerologyProfile& numerology);

/// One control message exchange.
struct ControlStep {
    Tick t_p_tx = 0;
    Tick t_fa = 0;
    Tick t_wait = 0;  ///< t_w^PUCCH for SR, t_q^PDCCH for DCI, 0 for NACK.
    Tick t_tt = 0;
    Tick t_p_rx = 0;

    Tick total() const { return t_p_tx + t_fa + t_wait + t_tt + t_p_rx; }
};

/// Dynamic-scheduling latency: SR (UL only) followed by the grant/assignment DCI.
struct SchedLatency {
    ControlStep sr;
    ControlStep grant;
    bool has_sr = false;

    Tick total() const { return sr.total() + grant.total(); }
};

/// PUCCH/PDCCH timing for one cell. Control messages use t_p^tx = T_proc,1/2
/// and t_p^rx = T_proc,2/2.
class ControlPlane {
  public:
    ControlPlane(const NumerologyProfile& numerology, const ControlConfig& control, const ProcessingTimes& proc,
                 int n_ue);

    const ControlConfig& control() const { return control_; }
    const SrConfig& sr_config() const { return sr_; }
    const DciQueue& dci_queue() const { return dci_; }
    DciQueue& dci_queue() { return dci_; }

    Tick tx_half() const { return proc_.t_proc1 / 2; }
    Tick rx_half() const { return proc_.t_proc2 / 2; }
    Tick pdcch_tt() const { return control_.n_sy_pdcch * numerology_.symbol_ticks(); }
    Tick pucch_tt() const { return control_.n_sy_pucch * numerology_.symbol_ticks(); }

    /// Start of the next PDCCH (symbol 0) / PUCCH (last symbols) at or after t.
    Tick next_pdcch(Tick t) const;
    Tick next_pucch(Tick t) const;

    /// SR on PUCCH with the uniform draw p.
    ControlStep sr_step(Tick ready, double p) const;
    /// DCI on PDCCH; enqueues on the shared DCI queue at ready + t_p^tx.
    ControlStep grant_step(Tick ready);
    /// Same timing without enqueuing.
    ControlStep peek_grant_step(Tick ready) const;
    /// NACK for a failed data transmission: PUCCH for UL data, PDCCH for DL
    /// data, with no resource wait.
    ControlStep nack_step(Direction data_direction, Tick ready) const;

    SchedLatency sched_dl(Tick ready);
    SchedLatency sched_ul(Tick ready, double p);

  private:
    ControlStep grant_from(Tick ready, const DciQueue::Slotting& s) const;

    NumerologyProfile numerology_;
    ControlConfig control_;
    ProcessingTimes proc_;
    SrConfig sr_;
    DciQueue dci_;
};

}  // namespace nrlat
