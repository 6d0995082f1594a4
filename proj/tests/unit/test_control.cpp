#include "doctest.h"

#include <algorithm>
#include <deque>
#include <random>
#include <vector>

#include "nrlat/control_plane.hpp"
#include "nrlat/errors.hpp"
#include "nrlat/random.hpp"
#include "oracles.hpp"

using namespace nrlat;
using namespace nrlat::oracle;

TEST_SUITE("control") {

TEST_CASE("reservation variants")
{
    const auto n30 = NumerologyProfile::for_scs(30);
    const auto c1 = ControlConfig::make(ControlVariant::Conf1, n30);
    const auto c2 = ControlConfig::make(ControlVariant::Conf2, n30);
    const auto c3 = ControlConfig::make(ControlVariant::Conf3, n30);
    CHECK(c2.n_rb_pdcch == 6 * c1.n_rb_pdcch);
    CHECK(c2.n_rb_pucch == 8 * c1.n_rb_pucch);
    CHECK(c2.n_sy_pdcch == c1.n_sy_pdcch);
    CHECK(c3.n_rb_pdcch == c1.n_rb_pdcch);
    CHECK(c3.ideal());
    CHECK(c1.dci_per_slot() == 4);
    CHECK(c1.sr_per_slot() == 12);
    // 60 kHz keeps the 30 kHz DCI budget per ms with half the PDCCH width.
    const auto n60 = NumerologyProfile::for_scs(60);
    CHECK(ControlConfig::conf1(n60).n_rb_pdcch == 4);
    CHECK(ControlConfig::conf1(n60).dci_per_slot() * 4 == c1.dci_per_slot() * 2);
    ControlConfig bad;
    bad.n_rb_pdcch = 1;
    bad.n_sy_pdcch = 3;
    CHECK_THROWS_AS(bad.validate(n30, 51), ConfigError);
    CHECK_NOTHROW(ControlConfig::make(ControlVariant::Conf2, n60).validate(n60, 24));
}

TEST_CASE("DCI queue matches the FIFO simulator on random traces")
{
    std::mt19937_64 rng(21);
    for (int trace = 0; trace < 1000; ++trace) {
        const auto n = NumerologyProfile::for_scs(15 << (rng() % 3));
        ControlConfig c = ControlConfig::conf1(n);
        c.n_rb_pdcch = 2 * (1 + static_cast<int>(rng() % 4));
        c.variant = (trace % 10 == 0) ? ControlVariant::Conf3 : ControlVariant::Conf1;
        DciQueue q(n, c);
        const int len = 1 + static_cast<int>(rng() % 300);
        const Tick span = n.slot_ticks() * (1 + static_cast<Tick>(rng() % 40));
        std::vector<Tick> arr(len);
        for (auto& a : arr) a = static_cast<Tick>(rng() % span);
        // Some arrivals exactly on slot boundaries.
        for (int i = 0; i < len / 5; ++i) arr[rng() % len] = (rng() % 40) * n.slot_ticks();
        std::sort(arr.begin(), arr.end());
        const auto want = fifo_oracle(arr, n.slot_ticks(), c.dci_per_slot(), c.ideal());
        for (int i = 0; i < len; ++i) {
            INFO("trace " << trace << " item " << i);
            REQUIRE(pdcch_queue_delay(arr[i], q, n) == want[i]);
        }
        CHECK(q.pushed() == static_cast<std::uint64_t>(len));
    }
}

TEST_CASE("DCI queue rejects time travel")
{
    const auto n = NumerologyProfile::for_scs(30);
    DciQueue q(n, ControlConfig::conf1(n));
    q.push(1000);
    CHECK_THROWS_AS(q.push(999), std::logic_error);
}

TEST_CASE("SR wait is uniform over its support")
{
    SrConfig sr;
    sr.n_slots_sr = 18;
    const Tick slot = 2688;
    CHECK(sr_wait(0.0, sr, slot) == 0);
    CHECK(sr_wait(1.0, sr, slot) == 17 * slot);
    CHECK_THROWS(sr_wait(1.5, sr, slot));

    // Exact: equal-width p cells map to equal counts.
    std::vector<int> exact(sr.n_slots_sr, 0);
    const int per = 1000;
    for (int j = 0; j < sr.n_slots_sr * per; ++j) {
        const double p = (j + 0.5) / (sr.n_slots_sr * per);
        exact[sr_wait(p, sr, slot) / slot]++;
    }
    for (int c : exact) CHECK(c == per);

    // Chi-square on pseudo-random draws (df = 17, 0.999 quantile 40.79).
    std::mt19937_64 rng(5);
    std::vector<int> counts(sr.n_slots_sr, 0);
    const int draws = 180000;
    for (int i = 0; i < draws; ++i) {
        const Tick w = sr_wait(uniform01(rng), sr, slot);
        REQUIRE(w % slot == 0);
        counts[w / slot]++;
    }
    double chi2 = 0;
    const double e = static_cast<double>(draws) / sr.n_slots_sr;
    for (int c : counts) chi2 += (c - e) * (c - e) / e;
    CHECK(chi2 < 40.79);
}

TEST_CASE("SR period scales with the population")
{
    const auto n = NumerologyProfile::for_scs(30);
    const auto c1 = ControlConfig::conf1(n);
    CHECK(SrConfig::make(c1, 208).n_slots_sr == 18);
    CHECK(SrConfig::make(c1, 12).n_slots_sr == 1);
    CHECK(SrConfig::make(ControlConfig::make(ControlVariant::Conf2, n), 208).n_slots_sr == 3);
    CHECK(SrConfig::make(ControlConfig::make(ControlVariant::Conf3, n), 5000).n_slots_sr == 1);
}

TEST_CASE("control steps")
{
    const auto n = NumerologyProfile::for_scs(30);
    const auto proc = PhyTables::standard().processing_times(1, 2);
    ControlPlane cp(n, ControlConfig::make(ControlVariant::Conf3, n), proc, 100);
    const Tick sym = n.symbol_ticks();
    // PUCCH sits in the last two symbols.
    CHECK(cp.next_pucch(0) == 12 * sym);
    CHECK(cp.next_pucch(12 * sym + 1) == n.slot_ticks() + 12 * sym);
    CHECK(cp.next_pdcch(1) == n.slot_ticks());
    CHECK(cp.next_pdcch(0) == 0);

    const ControlStep sr = cp.sr_step(0, 0.3);
    CHECK(sr.t_wait == 0);
    CHECK(sr.t_tt == 2 * sym);
    CHECK(sr.total() == sr.t_p_tx + sr.t_fa + sr.t_tt + sr.t_p_rx);
    CHECK(sr.t_fa <= n.slot_ticks());

    const ControlStep g = cp.peek_grant_step(0);
    CHECK(g.t_tt == 3 * sym);
    CHECK(g.t_wait == 0);
    CHECK(cp.dci_queue().pushed() == 0);
    cp.grant_step(0);
    CHECK(cp.dci_queue().pushed() == 1);

    const ControlStep ul_nack = cp.nack_step(Direction::Uplink, 0);
    const ControlStep dl_nack = cp.nack_step(Direction::Downlink, 0);
    CHECK(ul_nack.t_tt == 2 * sym);
    CHECK(dl_nack.t_tt == 3 * sym);
    CHECK(ul_nack.t_wait == 0);
    CHECK(dl_nack.t_wait == 0);
}

TEST_CASE("queueing delay ordering conf3 <= conf2 <= conf1 on one trace")
{
    const auto n = NumerologyProfile::for_scs(30);
    std::mt19937_64 rng(8);
    std::vector<Tick> arr(20000);
    for (auto& a : arr) a = static_cast<Tick>(rng() % (2000 * n.slot_ticks()));
    std::sort(arr.begin(), arr.end());
    double mean[3] = {0, 0, 0};
    const ControlVariant vs[] = {ControlVariant::Conf1, ControlVariant::Conf2, ControlVariant::Conf3};
    for (int v = 0; v < 3; ++v) {
        DciQueue q(n, ControlConfig::make(vs[v], n));
        for (Tick a : arr) mean[v] += static_cast<double>(pdcch_queue_delay(a, q, n));
        mean[v] /= static_cast<double>(arr.size());
    }
    CHECK(mean[2] <= mean[1]);
    CHECK(mean[1] <= mean[0]);
    CHECK(mean[0] > mean[1]);
}

}
