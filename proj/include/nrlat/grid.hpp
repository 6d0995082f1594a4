#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nrlat/control_config.hpp"
#include "nrlat/phy.hpp"
#include "nrlat/simd.hpp"
#include "nrlat/units.hpp"

namespace nrlat {

/// Start of the next transmission opportunity at or after `ready`.
///
/// Full-slot transmissions start only at the direction's data-region start;
/// a mini-slot of L symbols may start at any symbol s with s + L <= slot length.
Tick next_transmission_start(Tick ready, const NumerologyProfile& numerology, SlotType slot_type, Direction direction,
                             const ControlConfig& control);

/// t_fa: wait from `ready` to the next transmission opportunity.
Tick frame_alignment(Tick ready, const NumerologyProfile& numerology, SlotType slot_type, Direction direction,
                     const ControlConfig& control);

/// A data rectangle, repeated in `repetitions` consecutive slots.
struct Placement {
    std::int64_t slot = 0;
    int first_symbol = 0;
    int n_symbols = 0;
    int first_rb = 0;
    int n_rb = 0;
    int repetitions = 1;
    Tick start = 0;      ///< Start of the first copy.
    Tick first_end = 0;  ///< End of the first copy.
    Tick end = 0;        ///< End of the last copy.

    std::int64_t area() const { return static_cast<std::int64_t>(n_rb) * n_symbols * repetitions; }
    bool operator==(const Placement&) const = default;
};

struct Reservation {
    std::uint64_t owner = 0;
    Placement placement;
    bool released = false;
};

struct Allocation {
    Placement placement;
    Tick t_fa = 0;  ///< ready → first admissible boundary
    Tick t_w = 0;   ///< boundary → placement start
};

/// RB × symbol occupancy of one direction over time.
///
/// Each slot holds one bitmap row per symbol (bit = RB, 1 = occupied). The
/// control reservation is a rectangle at the top RBs: PDCCH in the first
/// symbols of DL slots, PUCCH in the last symbols of UL slots. Full-slot data
/// uses the data region on every RB; mini-slots may use any RB outside the
/// control rectangle.
///
/// Placement is first-fit in (slot, start symbol, lowest RB) order.
class SlotGrid {
  public:
    SlotGrid(const NumerologyProfile& numerology, Direction direction, int n_rb_total, const ControlConfig& control,
             SlotType slot_type);

    const NumerologyProfile& numerology() const { return numerology_; }
    Direction direction() const { return direction_; }
    SlotType slot_type() const { return slot_type_; }
    int n_rb_total() const { return n_rb_total_; }
    /// Symbols per transmission: data region length for full slots, 7 or 4 otherwise.
    int transmission_symbols() const { return tx_symbols_; }
    /// Widest rectangle of `transmission_symbols()` that fits an empty slot.
    int max_rbs() const { return max_rbs_; }

    Tick next_start(Tick ready) const;
    Tick frame_alignment(Tick ready) const { return next_start(ready) - ready; }

    /// Earliest placement at or after `earliest`. Returns nullopt only when
    /// the first copy would start after `latest_start`.
    /// Throws InfeasibleAllocation if n_rb exceeds max_rbs().
    std::optional<Placement> find(int n_rb, Tick earliest, int repetitions = 1, Tick latest_start = kNever) const;

    /// Marks the rectangle occupied. Throws std::logic_error on overlap.
    void commit(std::uint64_t owner, const Placement& p);

    /// find + commit; t_fa and t_w are measured from `ready`.
    Allocation allocate(std::uint64_t owner, int n_rb, Tick ready, int repetitions = 1);

    /// Frees a committed placement that has not started yet.
    void release(const Placement& p);

    /// Drops bitmap state of every slot that ends at or before `now`.
    /// Returns the number of slots freed.
    std::size_t release_expired(Tick now);

    /// Allocated data RB·symbols / data RB·symbol capacity over [from, to).
    double utilization(Tick from, Tick to) const;
    /// Numerator and denominator of utilization() in RB·ticks.
    std::pair<std::int64_t, std::int64_t> utilization_terms(Tick from, Tick to) const;

    /// Occupied RBs (control + data) in one symbol of a live slot.
    int occupied_rbs(std::int64_t slot, int symbol) const;
    bool is_free(std::int64_t slot, int symbol, int rb) const;

    /// Keep a reservation ledger for traces and audits (off by default).
    void set_ledger(bool on) { ledger_on_ = on; }
    const std::vector<Reservation>& ledger() const { return ledger_; }
    /// CSV: owner,slot,first_rb,n_rb,first_symbol,n_symbols,repetitions,released
    void write_trace_csv(std::ostream& os) const;

    std::int64_t first_live_slot() const { return base_slot_; }

  private:
    using Word = std::uint64_t;

    const Word* rows(std::int64_t slot) const;
    Word* rows_mut(std::int64_t slot);
    void ensure_slot(std::int64_t slot) const;
    int control_rbs(int symbol) const;
    int capacity_rbs(int symbol) const;
    bool fits_counts(std::int64_t slot, int first_symbol, int n_rb) const;
    void add_used(std::int64_t slot, int symbol, int delta);
    int used(std::int64_t slot, int symbol) const;

    NumerologyProfile numerology_;
    Direction direction_;
    SlotType slot_type_;
    ControlConfig control_;
    int n_rb_total_;
    int nsym_;
    int tx_symbols_;
    int max_rbs_ = 0;
    std::size_t words_;
    std::vector<int> starts_;         // admissible start symbols
    std::vector<Word> template_;      // control-only slot
    std::vector<int> ctrl_rbs_;       // per symbol
    std::vector<int> capacity_;       // per symbol

    mutable std::deque<std::vector<Word>> slots_;
    mutable std::int64_t base_slot_ = 0;
    std::vector<std::uint16_t> used_;  // data RBs per (slot, symbol), never trimmed

    bool ledger_on_ = false;
    std::vector<Reservation> ledger_;
    const simd::Kernels* kernels_;
};

}  // namespace nrlat
