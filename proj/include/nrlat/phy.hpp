#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <utility>

#include "nrlat/units.hpp"

namespace nrlat {

enum class CyclicPrefix { Normal, Extended };
enum class Direction { Uplink, Downlink };

/// Transmission length: a full slot or a 7/4-symbol mini-slot.
enum class SlotType { Full, Mini7, Mini4 };

const char* to_string(CyclicPrefix cp);
const char* to_string(Direction d);
const char* to_string(SlotType s);
SlotType slot_type_from_string(std::string_view s);

/// Slot/symbol geometry of one FR1 numerology.
///
/// Only the evaluated set is constructible: 15 and 30 kHz with normal CP,
/// 60 kHz with extended CP.
class NumerologyProfile {
  public:
    static NumerologyProfile make(int scs_khz, CyclicPrefix cp);
    /// 15/30 kHz → NCP, 60 kHz → ECP.
    static NumerologyProfile for_scs(int scs_khz);

    int mu() const { return mu_; }
    int scs_khz() const { return scs_khz_; }
    CyclicPrefix cp() const { return cp_; }
    int symbols_per_slot() const { return symbols_per_slot_; }

    Tick slot_ticks() const { return slot_ticks_; }
    Tick symbol_ticks() const { return slot_ticks_ / symbols_per_slot_; }
    /// Average NCP symbol of this numerology; processing times are counted in it.
    Tick reference_symbol_ticks() const { return slot_ticks_ / 14; }

    double slot_duration_ms() const { return to_ms(slot_ticks_); }
    double symbol_duration_ms() const { return to_ms(symbol_ticks()); }

    std::int64_t slot_of(Tick t) const { return floor_div(t, slot_ticks_); }
    Tick slot_start(std::int64_t slot) const { return slot * slot_ticks_; }
    Tick symbol_start(std::int64_t slot, int symbol) const { return slot * slot_ticks_ + symbol * symbol_ticks(); }

    bool operator==(const NumerologyProfile&) const = default;

  private:
    NumerologyProfile(int mu, int scs, CyclicPrefix cp);

    int mu_;
    int scs_khz_;
    CyclicPrefix cp_;
    int symbols_per_slot_;
    Tick slot_ticks_;
};

/// Slot duration 1/2^mu ms for mu in {0,1,2}.
double slot_duration_ms(int mu);
Tick slot_ticks_for_mu(int mu);

/// Number of symbols a transmission of this type occupies; full slots use the
/// direction's data region.
int transmission_symbols(SlotType type, int full_slot_symbols);

struct SymbolRange {
    int first = 0;
    int count = 0;
    int last() const { return first + count - 1; }
    bool operator==(const SymbolRange&) const = default;
};

struct ControlConfig;

/// Symbols that carry full-slot data: after the PDCCH in DL, before the PUCCH in UL.
SymbolRange data_region(const NumerologyProfile& numerology, Direction direction, const ControlConfig& control);

struct ProcessingTimes {
    Tick t_proc1 = 0;  ///< PDSCH processing time.
    Tick t_proc2 = 0;  ///< PUSCH preparation time.
    int ue_capability = 2;

    // t_p^tx = T_proc,2 / 2 and t_p^rx = T_proc,1 / 2 on both UE and gNB.
    Tick tx_half() const { return t_proc2 / 2; }
    Tick rx_half() const { return t_proc1 / 2; }
    double t_proc1_ms() const { return to_ms(t_proc1); }
    double t_proc2_ms() const { return to_ms(t_proc2); }
};

/// RB counts and processing-time tables loaded from the data/ constants files.
class PhyTables {
  public:
    static const PhyTables& standard();
    static PhyTables from_text(std::string_view nrb_text, std::string_view processing_text);

    int total_rbs(int bw_mhz, int scs_khz) const;
    bool supports(int bw_mhz, int scs_khz) const;
    ProcessingTimes processing_times(int mu, int ue_capability) const;

    const std::map<std::pair<int, int>, int>& rb_table() const { return nrb_; }

  private:
    std::map<std::pair<int, int>, int> nrb_;          // (bw, scs) → N_RB
    std::map<std::pair<int, int>, double> n1_, n2_;  // (mu, capability) → symbols
};

}  // namespace nrlat
