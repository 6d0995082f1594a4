#pragma once

#include <string>
#include <string_view>

#include "nrlat/link.hpp"
#include "nrlat/phy.hpp"

namespace nrlat {

enum class Scheduling { SemiStatic, Dynamic };
enum class Retransmission { None, KRepetitions, Harq };
enum class Cast { Broadcast, Unicast };

const char* to_string(Scheduling s);
const char* to_string(Retransmission r);
const char* to_string(Cast c);
Scheduling scheduling_from_string(std::string_view s);
Retransmission retransmission_from_string(std::string_view s);
Cast cast_from_string(std::string_view s);

/// One radio configuration: scheduling × retransmission × cast × slot type × MCS table.
struct SchemeConfig {
    Scheduling scheduling = Scheduling::SemiStatic;
    Retransmission retransmission = Retransmission::None;
    int k = 1;       ///< Copies for k-repetitions (2, 4 or 8).
    int max_n = 0;   ///< Maximum HARQ retransmissions.
    Cast dl_cast = Cast::Broadcast;
    int m = 4;       ///< DL receivers per packet (nearest neighbours).
    SlotType slot_type = SlotType::Full;
    McsTable mcs_table = McsTable::LEP;

    int repetitions() const { return retransmission == Retransmission::KRepetitions ? k : 1; }
    int max_retx() const { return retransmission == Retransmission::Harq ? max_n : 0; }

    /// Throws ConfigError on k outside {2,4,8}, max_n < 1 or M < 1.
    void validate() const;
    std::string describe() const;

    bool operator==(const SchemeConfig&) const = default;
};

}  // namespace nrlat
