#pragma once

#include <string_view>
#include <vector>

namespace nrlat {

inline constexpr double kCellRadiusM = 866.0;

/// LEP = MCS/CQI table 2 (target BLER 0.1), HEP = table 3 (target BLER 1e-5).
enum class McsTable { LEP, HEP };

const char* to_string(McsTable t);
McsTable mcs_table_from_string(std::string_view s);
double target_bler(McsTable t);

struct McsEntry {
    int index = 0;
    int modulation_order = 2;
    int rate_x1024 = 0;
    double spectral_efficiency = 0.0;

    double code_rate() const { return rate_x1024 / 1024.0; }
};

struct CqiEntry {
    int index = 0;
    int modulation_order = 2;
    int rate_x1024 = 0;
    double efficiency = 0.0;
};

/// MCS, CQI and TBS tables loaded from data/.
class LinkTables {
  public:
    static const LinkTables& standard();

    const std::vector<McsEntry>& mcs(McsTable t) const { return t == McsTable::LEP ? mcs2_ : mcs3_; }
    const std::vector<CqiEntry>& cqi(McsTable t) const { return t == McsTable::LEP ? cqi2_ : cqi3_; }
    /// TBS values for N_info <= 3824, ascending.
    const std::vector<int>& tbs() const { return tbs_; }

  private:
    std::vector<McsEntry> mcs2_, mcs3_;
    std::vector<CqiEntry> cqi2_, cqi3_;
    std::vector<int> tbs_;
};

struct CqiMapEntry {
    double distance_upper_bound_m = 0.0;
    int cqi = 0;
    bool operator==(const CqiMapEntry&) const = default;
};

struct LinkProfile {
    McsTable mcs_table = McsTable::LEP;
    double target_bler = 0.1;
    std::vector<CqiMapEntry> cqi_map;

    /// Default profile: linear CQI quantization from 15 at the gNB down to
    /// the calibrated edge CQI (7 for LEP, 6 for HEP).
    static LinkProfile make(McsTable table);
    static LinkProfile with_map(McsTable table, std::vector<CqiMapEntry> map);

    /// Throws ConfigError on a malformed map.
    void validate() const;
};

int default_edge_cqi(McsTable table);

/// Equal-width distance bins over [0, radius], CQI `best` in the first bin
/// and decreasing by one per bin down to `worst`.
std::vector<CqiMapEntry> linear_cqi_map(int best, int worst, double radius_m = kCellRadiusM);

int cqi_from_distance(double distance_m, const LinkProfile& profile);

/// Highest MCS whose spectral efficiency does not exceed the CQI's.
/// Throws NoTransmission when no MCS qualifies (including CQI 0).
const McsEntry& mcs_from_cqi(int cqi, McsTable table);

inline constexpr int kDefaultLayers = 2;
inline constexpr int kDefaultOverheadRePerRb = 12;
inline constexpr int kMaxRbs = 275;

/// Transport block size per the TS 38.214 PDSCH/PUSCH procedure.
long transport_block_size(const McsEntry& mcs, int n_rb, int n_symbols, int layers,
                          int overhead_re_per_rb = kDefaultOverheadRePerRb);

/// Smallest RB count whose TBS carries the payload.
/// Throws InfeasibleAllocation if even `max_rb` RBs do not suffice.
int rbs_for_packet(long payload_bits, const McsEntry& mcs, int n_symbols, int layers,
                   int overhead_re_per_rb = kDefaultOverheadRePerRb, int max_rb = kMaxRbs);

}  // namespace nrlat
