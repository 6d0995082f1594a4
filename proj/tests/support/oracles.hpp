#pragma once

// Independent reference implementations shared by the unit and acceptance tests.

#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "nrlat/control_config.hpp"
#include "nrlat/grid.hpp"

namespace nrlat::oracle {

// Occupancy cube kept by the test, control rectangles included.
struct GridOracle {
    NumerologyProfile num;
    Direction dir;
    SlotType type;
    ControlConfig ctrl;
    int n_rb;
    int nsym;
    std::vector<std::vector<std::vector<bool>>> occ;  // [slot][symbol][rb]

    GridOracle(const NumerologyProfile& n, Direction d, SlotType t, const ControlConfig& c, int rbs)
        : num(n), dir(d), type(t), ctrl(c), n_rb(rbs), nsym(n.symbols_per_slot())
    {
    }

    void grow(std::int64_t slot)
    {
        while (static_cast<std::int64_t>(occ.size()) <= slot) {
            std::vector<std::vector<bool>> s(nsym, std::vector<bool>(n_rb, false));
            for (int q = 0; q < nsym; ++q) {
                const bool ctl = dir == Direction::Downlink ? q < ctrl.n_sy_pdcch : q >= nsym - ctrl.n_sy_pucch;
                const int w = dir == Direction::Downlink ? ctrl.n_rb_pdcch : ctrl.n_rb_pucch;
                if (ctl) {
                    for (int r = n_rb - w; r < n_rb; ++r) s[q][r] = true;
                }
            }
            occ.push_back(s);
        }
    }

    int first_start() const { return dir == Direction::Downlink ? ctrl.n_sy_pdcch : 0; }
    int length() const
    {
        if (type == SlotType::Full) return nsym - (dir == Direction::Downlink ? ctrl.n_sy_pdcch : ctrl.n_sy_pucch);
        return type == SlotType::Mini7 ? 7 : 4;
    }

    bool free_rect(std::int64_t slot, int s, int rb, int n, int reps)
    {
        for (int k = 0; k < reps; ++k) {
            grow(slot + k);
            for (int q = s; q < s + length(); ++q) {
                for (int r = rb; r < rb + n; ++r) {
                    if (occ[slot + k][q][r]) return false;
                }
            }
        }
        return true;
    }

    std::optional<Placement> find(int n, Tick earliest, int reps)
    {
        const Tick sym = num.slot_ticks() / nsym;
        for (std::int64_t slot = earliest / num.slot_ticks(); slot < 64; ++slot) {
            for (int s = 0; s + length() <= nsym; ++s) {
                if (type == SlotType::Full && s != first_start()) continue;
                const Tick t = slot * num.slot_ticks() + s * sym;
                if (t < earliest) continue;
                for (int rb = 0; rb + n <= n_rb; ++rb) {
                    if (!free_rect(slot, s, rb, n, reps)) continue;
                    Placement p;
                    p.slot = slot;
                    p.first_symbol = s;
                    p.n_symbols = length();
                    p.first_rb = rb;
                    p.n_rb = n;
                    p.repetitions = reps;
                    p.start = t;
                    p.first_end = t + length() * sym;
                    p.end = p.first_end + (reps - 1) * num.slot_ticks();
                    return p;
                }
            }
        }
        return std::nullopt;
    }

    void mark(const Placement& p)
    {
        for (int k = 0; k < p.repetitions; ++k) {
            grow(p.slot + k);
            for (int q = p.first_symbol; q < p.first_symbol + p.n_symbols; ++q) {
                for (int r = p.first_rb; r < p.first_rb + p.n_rb; ++r) occ[p.slot + k][q][r] = true;
            }
        }
    }
};

inline ControlConfig small_control()
{
    ControlConfig c;
    c.n_rb_pdcch = 2;
    c.n_sy_pdcch = 3;
    c.n_rb_pucch = 1;
    c.n_sy_pucch = 2;
    return c;
}


// Slot-by-slot FIFO: each PDCCH serves up to `cap` DCIs that arrived at or
// before its start, oldest first.
inline std::vector<Tick> fifo_oracle(const std::vector<Tick>& arrivals, Tick slot, int cap, bool ideal)
{
    std::vector<Tick> delay(arrivals.size());
    std::deque<std::size_t> q;
    std::size_t next = 0;
    for (std::int64_t k = 0; next < arrivals.size() || !q.empty(); ++k) {
        const Tick start = k * slot;
        while (next < arrivals.size() && arrivals[next] <= start) q.push_back(next++);
        int served = 0;
        while (!q.empty() && (ideal || served < cap)) {
            delay[q.front()] = start - arrivals[q.front()];
            q.pop_front();
            ++served;
        }
    }
    return delay;
}


// TS 38.214 Table 5.1.3.2-1, typed in independently of data/.
inline const int kTbs[] = {24,   32,   40,   48,   56,   64,   72,   80,   88,   96,   104,  112,  120,  128,  136,  144,
                    152,  160,  168,  176,  184,  192,  208,  224,  240,  256,  272,  288,  304,  320,  336,  352,
                    368,  384,  408,  432,  456,  480,  504,  528,  552,  576,  608,  640,  672,  704,  736,  768,
                    808,  848,  888,  928,  984,  1032, 1064, 1128, 1160, 1192, 1224, 1256, 1288, 1320, 1352, 1416,
                    1480, 1544, 1608, 1672, 1736, 1800, 1864, 1928, 2024, 2088, 2152, 2216, 2280, 2408, 2472, 2536,
                    2600, 2664, 2728, 2792, 2856, 2976, 3104, 3240, 3368, 3496, 3624, 3752, 3824};

inline int floor_log2(double x)
{
    int k = 0;
    double p = 1.0;
    while (p * 2.0 <= x) {
        p *= 2.0;
        ++k;
    }
    return k;
}

inline long oracle_tbs(int qm, int r1024, int n_rb, int nsym, int layers, int oh)
{
    int nre_prime = 12 * nsym - oh;
    if (nre_prime > 156) nre_prime = 156;
    if (nre_prime <= 0) return 0;
    const long nre = static_cast<long>(nre_prime) * n_rb;
    // r1024/1024 is exact in binary, so this product is exact.
    const double ninfo = static_cast<double>(nre) * r1024 * qm * layers / 1024.0;
    if (ninfo <= 3824) {
        int n = floor_log2(ninfo) - 6;
        if (n < 3) n = 3;
        const double p = std::pow(2.0, n);
        double q = p * std::floor(ninfo / p);
        if (q < 24) q = 24;
        for (int v : kTbs) {
            if (v >= q) return v;
        }
        return 3824;
    }
    const int n = floor_log2(ninfo - 24) - 5;
    const double p = std::pow(2.0, n);
    double q = p * std::round((ninfo - 24) / p);
    if (q < 3840) q = 3840;
    long c;
    if (r1024 * 4 <= 1024) {
        c = static_cast<long>(std::ceil((q + 24) / 3816));
    } else if (q > 8424) {
        c = static_cast<long>(std::ceil((q + 24) / 8424));
    } else {
        c = 1;
    }
    return 8 * c * static_cast<long>(std::ceil((q + 24) / (8.0 * c))) - 24;
}


}  // namespace nrlat::oracle
