#include "nrlat/control_config.hpp"

#include <string>

#include "nrlat/errors.hpp"

namespace nrlat {

const char* to_string(ControlVariant v)
{
    switch (v) {
    case ControlVariant::Conf1: return "conf1";
    case ControlVariant::Conf2: return "conf2";
    case ControlVariant::Conf3: return "conf3";
    }
    return "?";
}

ControlVariant control_variant_from_string(std::string_view s)
{
    if (s == "conf1") return ControlVariant::Conf1;
    if (s == "conf2") return ControlVariant::Conf2;
    if (s == "conf3") return ControlVariant::Conf3;
    throw ConfigError("unknown control variant '" + std::string(s) + "' (conf1, conf2, conf3)");
}

ControlConfig ControlConfig::conf1(const NumerologyProfile& numerology)
{
    ControlConfig c;
    // Narrower PDCCH at 60 kHz keeps the conf2 scaling inside a 20 MHz carrier
    // and the per-ms DCI budget equal across numerologies.
    c.n_rb_pdcch = numerology.mu() == 2 ? 4 : 8;
    return c;
}

ControlConfig ControlConfig::derive(ControlVariant variant, const ControlConfig& baseline)
{
    ControlConfig c = baseline;
    c.variant = variant;
    if (variant == ControlVariant::Conf2) {
        c.n_rb_pdcch *= 6;
        c.n_rb_pucch *= 8;
    }
    return c;
}

ControlConfig ControlConfig::make(ControlVariant variant, const NumerologyProfile& numerology)
{
    return derive(variant, conf1(numerology));
}

void ControlConfig::validate(const NumerologyProfile& numerology, int n_rb_total) const
{
    auto fail = [&](const std::string& what) {
        throw ConfigError(std::string(to_string(variant)) + ": " + what + " (carrier has " +
                          std::to_string(n_rb_total) + " RBs x " + std::to_string(numerology.symbols_per_slot()) +
                          " symbols)");
    };
    if (n_rb_pdcch < 1 || n_sy_pdcch < 1 || dci_per_slot() < 1) fail("PDCCH must hold at least one DCI (6 RB-symbols)");
    if (n_rb_pucch < 1 || n_sy_pucch < 1) fail("PUCCH needs at least 1 RB x 1 symbol");
    if (n_rb_pdcch > n_rb_total) fail("PDCCH needs " + std::to_string(n_rb_pdcch) + " RBs");
    if (n_rb_pucch > n_rb_total) fail("PUCCH needs " + std::to_string(n_rb_pucch) + " RBs");
    if (n_sy_pdcch >= numerology.symbols_per_slot()) fail("PDCCH symbols fill the slot");
    if (n_sy_pucch >= numerology.symbols_per_slot()) fail("PUCCH symbols fill the slot");
}

}  // namespace nrlat
