#pragma once

#include <string_view>

#include "nrlat/phy.hpp"

namespace nrlat {

enum class ControlVariant { Conf1, Conf2, Conf3 };

const char* to_string(ControlVariant v);
ControlVariant control_variant_from_string(std::string_view s);

/// RB × symbol reservations for PDCCH (first symbols of each DL slot) and
/// PUCCH (last symbols of each UL slot).
///
/// Conf2 scales the Conf1 PDCCH RBs by 6 and PUCCH RBs by 8. Conf3 keeps the
/// Conf1 geometry but control messages never queue.
struct ControlConfig {
    int n_rb_pdcch = 8;
    int n_sy_pdcch = 3;
    int n_rb_pucch = 1;
    int n_sy_pucch = 2;
    ControlVariant variant = ControlVariant::Conf1;

    bool ideal() const { return variant == ControlVariant::Conf3; }

    /// DCI format 1_0 needs 6 RB-symbols; capacity is counted by area.
    int dci_per_slot() const { return n_rb_pdcch * n_sy_pdcch / 6; }
    /// PUCCH format 0 carries one SR per RB and symbol, 6 UEs multiplexed.
    int sr_per_slot() const { return n_rb_pucch * n_sy_pucch * 6; }

    /// Baseline reservation for a numerology.
    static ControlConfig conf1(const NumerologyProfile& numerology);
    static ControlConfig make(ControlVariant variant, const NumerologyProfile& numerology);
    /// Applies the variant's scaling to an explicit baseline.
    static ControlConfig derive(ControlVariant variant, const ControlConfig& baseline);

    /// Throws ConfigError if the reservation does not fit the carrier.
    void validate(const NumerologyProfile& numerology, int n_rb_total) const;

    bool operator==(const ControlConfig&) const = default;
};

}  // namespace nrlat
