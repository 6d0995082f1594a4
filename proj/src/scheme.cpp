#include "nrlat/scheme.hpp"

#include "nrlat/errors.hpp"

namespace nrlat {

const char* to_string(Scheduling s) { return s == Scheduling::SemiStatic ? "semi_static" : "dynamic"; }

const char* to_string(Retransmission r)
{
    switch (r) {
    case Retransmission::None: return "none";
    case Retransmission::KRepetitions: return "k_repetitions";
    case Retransmission::Harq: return "harq";
    }
    return "?";
}

const char* to_string(Cast c) { return c == Cast::Broadcast ? "broadcast" : "unicast"; }

Scheduling scheduling_from_string(std::string_view s)
{
    if (s == "semi_static") return Scheduling::SemiStatic;
    if (s == "dynamic") return Scheduling::Dynamic;
    throw ConfigError("unknown scheduling '" + std::string(s) + "' (semi_static, dynamic)");
}

Retransmission retransmission_from_string(std::string_view s)
{
    if (s == "none") return Retransmission::None;
    if (s == "k_repetitions") return Retransmission::KRepetitions;
    if (s == "harq") return Retransmission::Harq;
    throw ConfigError("unknown retransmission '" + std::string(s) + "' (none, k_repetitions, harq)");
}

Cast cast_from_string(std::string_view s)
{
    if (s == "broadcast") return Cast::Broadcast;
    if (s == "unicast") return Cast::Unicast;
    throw ConfigError("unknown cast '" + std::string(s) + "' (broadcast, unicast)");
}

void SchemeConfig::validate() const
{
    if (retransmission == Retransmission::KRepetitions && k != 2 && k != 4 && k != 8) {
        throw ConfigError("k-repetitions needs k in {2, 4, 8}, got " + std::to_string(k));
    }
    if (retransmission == Retransmission::Harq && max_n < 1) {
        throw ConfigError("HARQ needs max_n >= 1, got " + std::to_string(max_n));
    }
    if (m < 1) throw ConfigError("M must be >= 1");
}

std::string SchemeConfig::describe() const
{
    std::string s = std::string(to_string(scheduling)) + "/" + to_string(retransmission);
    if (retransmission == Retransmission::KRepetitions) s += "(k=" + std::to_string(k) + ")";
    if (retransmission == Retransmission::Harq) s += "(n=" + std::to_string(max_n) + ")";
    s += std::string("/") + to_string(dl_cast) + "(M=" + std::to_string(m) + ")/" + to_string(slot_type) + "/" +
         to_string(mcs_table);
    return s;
}

}  // namespace nrlat
