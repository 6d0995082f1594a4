#include "nrlat/phy.hpp"

#include <string>

#include "nrlat/control_config.hpp"
#include "nrlat/errors.hpp"
#include "nrlat/table_file.hpp"

namespace nrlat {

const char* to_string(CyclicPrefix cp) { return cp == CyclicPrefix::Normal ? "NCP" : "ECP"; }

const char* to_string(Direction d) { return d == Direction::Uplink ? "UL" : "DL"; }

const char* to_string(SlotType s)
{
    switch (s) {
    case SlotType::Full: return "full";
    case SlotType::Mini7: return "mini7";
    case SlotType::Mini4: return "mini4";
    }
    return "?";
}

SlotType slot_type_from_string(std::string_view s)
{
    if (s == "full") return SlotType::Full;
    if (s == "mini7") return SlotType::Mini7;
    if (s == "mini4") return SlotType::Mini4;
    throw ConfigError("unknown slot type '" + std::string(s) + "' (full, mini7, mini4)");
}

Tick slot_ticks_for_mu(int mu)
{
    if (mu < 0 || mu > 2) {
        throw ConfigError("numerology mu=" + std::to_string(mu) + " outside {0,1,2}");
    }
    return kTicksPerMs >> mu;
}

double slot_duration_ms(int mu) { return to_ms(slot_ticks_for_mu(mu)); }

NumerologyProfile::NumerologyProfile(int mu, int scs, CyclicPrefix cp)
    : mu_(mu), scs_khz_(scs), cp_(cp), symbols_per_slot_(cp == CyclicPrefix::Normal ? 14 : 12),
      slot_ticks_(slot_ticks_for_mu(mu))
{
}

NumerologyProfile NumerologyProfile::make(int scs_khz, CyclicPrefix cp)
{
    switch (scs_khz) {
    case 15:
    case 30:
        if (cp != CyclicPrefix::Normal) {
            throw ConfigError(std::to_string(scs_khz) + " kHz is only evaluated with normal CP");
        }
        return NumerologyProfile(scs_khz == 15 ? 0 : 1, scs_khz, cp);
    case 60:
        if (cp != CyclicPrefix::Extended) {
            throw ConfigError("60 kHz is only evaluated with extended CP");
        }
        return NumerologyProfile(2, 60, cp);
    default:
        throw ConfigError("unsupported subcarrier spacing " + std::to_string(scs_khz) + " kHz");
    }
}

NumerologyProfile NumerologyProfile::for_scs(int scs_khz)
{
    return make(scs_khz, scs_khz == 60 ? CyclicPrefix::Extended : CyclicPrefix::Normal);
}

int transmission_symbols(SlotType type, int full_slot_symbols)
{
    switch (type) {
    case SlotType::Mini7: return 7;
    case SlotType::Mini4: return 4;
    case SlotType::Full: break;
    }
    return full_slot_symbols;
}

SymbolRange data_region(const NumerologyProfile& numerology, Direction direction, const ControlConfig& control)
{
    const int nsym = numerology.symbols_per_slot();
    const int reserved = direction == Direction::Downlink ? control.n_sy_pdcch : control.n_sy_pucch;
    if (reserved < 0 || reserved >= nsym) {
        throw ConfigError(std::string(direction == Direction::Downlink ? "PDCCH" : "PUCCH") + " reservation of " +
                          std::to_string(reserved) + " symbols leaves no data symbols in a " + std::to_string(nsym) +
                          "-symbol slot");
    }
    if (direction == Direction::Downlink) {
        return {reserved, nsym - reserved};
    }
    return {0, nsym - reserved};
}

namespace {

int parse_int(const TableRow& row, const std::string& s)
{
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(row.line) + ": expected integer, got '" + s + "'");
    }
}

}  // namespace

PhyTables PhyTables::from_text(std::string_view nrb_text, std::string_view processing_text)
{
    PhyTables t;
    for (const auto& row : parse_table(nrb_text, "nrb")) {
        auto k = split(row.key, ':');
        if (k.size() != 2) throw ConfigError("nrb line " + std::to_string(row.line) + ": key must be bw:scs");
        t.nrb_[{parse_int(row, k[0]), parse_int(row, k[1])}] = parse_int(row, row.value);
    }
    for (const auto& row : parse_table(processing_text, "processing")) {
        auto k = split(row.key, ':');
        if (k.size() != 3 || (k[0] != "N1" && k[0] != "N2")) {
            throw ConfigError("processing line " + std::to_string(row.line) + ": key must be N1|N2:mu:cap");
        }
        auto& dst = k[0] == "N1" ? t.n1_ : t.n2_;
        dst[{parse_int(row, k[1]), parse_int(row, k[2])}] = std::stod(row.value);
    }
    return t;
}

const PhyTables& PhyTables::standard()
{
    static const PhyTables tables = from_text(embedded::nrb_table(), embedded::processing_table());
    return tables;
}

bool PhyTables::supports(int bw_mhz, int scs_khz) const { return nrb_.count({bw_mhz, scs_khz}) != 0; }

int PhyTables::total_rbs(int bw_mhz, int scs_khz) const
{
    auto it = nrb_.find({bw_mhz, scs_khz});
    if (it == nrb_.end()) {
        throw ConfigError("no RB count for " + std::to_string(bw_mhz) + " MHz at " + std::to_string(scs_khz) + " kHz");
    }
    return it->second;
}

ProcessingTimes PhyTables::processing_times(int mu, int ue_capability) const
{
    const Tick slot = slot_ticks_for_mu(mu);
    auto a = n1_.find({mu, ue_capability});
    auto b = n2_.find({mu, ue_capability});
    if (a == n1_.end() || b == n2_.end()) {
        throw ConfigError("no processing times for mu=" + std::to_string(mu) + " capability " +
                          std::to_string(ue_capability));
    }
    // N symbols of slot/14 each; half-symbol entries (4.5, 5.5) stay exact on the tick grid.
    auto to_ticks = [slot](double n) { return static_cast<Tick>(std::llround(n * 2.0)) * slot / 28; };
    return {to_ticks(a->second), to_ticks(b->second), ue_capability};
}

}  // namespace nrlat
