#include "doctest.h"

#include "nrlat/control_config.hpp"
#include "nrlat/errors.hpp"
#include "nrlat/grid.hpp"
#include "nrlat/phy.hpp"

using namespace nrlat;

TEST_SUITE("phy") {

TEST_CASE("evaluated numerologies only")
{
    CHECK(NumerologyProfile::make(15, CyclicPrefix::Normal).symbols_per_slot() == 14);
    CHECK(NumerologyProfile::make(60, CyclicPrefix::Extended).symbols_per_slot() == 12);
    CHECK_THROWS_AS(NumerologyProfile::make(60, CyclicPrefix::Normal), ConfigError);
    CHECK_THROWS_AS(NumerologyProfile::make(30, CyclicPrefix::Extended), ConfigError);
    CHECK_THROWS_AS(NumerologyProfile::for_scs(120), ConfigError);
}

TEST_CASE("slot and symbol durations")
{
    for (int mu = 0; mu <= 2; ++mu) {
        const auto n = NumerologyProfile::for_scs(15 << mu);
        CHECK(n.mu() == mu);
        CHECK(n.slot_duration_ms() == doctest::Approx(1.0 / (1 << mu)));
        CHECK(n.symbol_ticks() * n.symbols_per_slot() == n.slot_ticks());
    }
    CHECK(NumerologyProfile::for_scs(60).symbol_duration_ms() == doctest::Approx(0.25 / 12));
}

TEST_CASE("RB counts")
{
    const auto& t = PhyTables::standard();
    // 38.101-1 Table 5.3.2-1
    CHECK(t.total_rbs(20, 15) == 106);
    CHECK(t.total_rbs(20, 30) == 51);
    CHECK(t.total_rbs(20, 60) == 24);
    CHECK(t.total_rbs(40, 15) == 216);
    CHECK(t.total_rbs(40, 30) == 106);
    CHECK(t.total_rbs(40, 60) == 51);
    CHECK(t.total_rbs(10, 30) == 24);
    CHECK_THROWS_AS(t.total_rbs(20, 120), ConfigError);
}

TEST_CASE("capability 2 processing times")
{
    const auto& t = PhyTables::standard();
    // N1 = 3, 4.5, 9 and N2 = 5, 5.5, 11 symbols of slot/14.
    const double n1[] = {3, 4.5, 9};
    const double n2[] = {5, 5.5, 11};
    for (int mu = 0; mu <= 2; ++mu) {
        const auto p = t.processing_times(mu, 2);
        const double sym = 1.0 / (1 << mu) / 14.0;
        CHECK(p.t_proc1_ms() == doctest::Approx(n1[mu] * sym));
        CHECK(p.t_proc2_ms() == doctest::Approx(n2[mu] * sym));
    }
    // 30 kHz: T_proc,1 = 4.5/28 ms
    CHECK(t.processing_times(1, 2).t_proc1 * 28 == 4.5 * kTicksPerMs);
}

TEST_CASE("data regions")
{
    const auto n30 = NumerologyProfile::for_scs(30);
    const auto c = ControlConfig::conf1(n30);
    CHECK(data_region(n30, Direction::Downlink, c) == SymbolRange{3, 11});
    CHECK(data_region(n30, Direction::Uplink, c) == SymbolRange{0, 12});
    const auto n60 = NumerologyProfile::for_scs(60);
    CHECK(data_region(n60, Direction::Downlink, ControlConfig::conf1(n60)) == SymbolRange{3, 9});
    CHECK(data_region(n60, Direction::Uplink, ControlConfig::conf1(n60)) == SymbolRange{0, 10});
}

// Straight-line t_fa: scan every tick of a slot pair for the next boundary.
TEST_CASE("frame alignment matches boundary enumeration")
{
    for (int scs : {15, 30, 60}) {
        const auto n = NumerologyProfile::for_scs(scs);
        const auto c = ControlConfig::conf1(n);
        for (auto type : {SlotType::Full, SlotType::Mini7, SlotType::Mini4}) {
            for (auto dir : {Direction::Uplink, Direction::Downlink}) {
                const SymbolRange region = data_region(n, dir, c);
                const int len = type == SlotType::Full ? region.count : transmission_symbols(type, n.symbols_per_slot());
                std::vector<Tick> bounds;
                for (std::int64_t slot = 0; slot < 3; ++slot) {
                    for (int s = 0; s < n.symbols_per_slot(); ++s) {
                        const bool ok = type == SlotType::Full ? s == region.first : s + len <= n.symbols_per_slot();
                        if (ok) bounds.push_back(slot * n.slot_ticks() + s * (n.slot_ticks() / n.symbols_per_slot()));
                    }
                }
                int over = 0;
                const int stride = scs == 15 ? 7 : 3;
                for (Tick t = 0; t < 2 * n.slot_ticks(); t += stride) {
                    Tick expect = -1;
                    for (Tick b : bounds) {
                        if (b >= t) {
                            expect = b;
                            break;
                        }
                    }
                    const Tick got = frame_alignment(t, n, type, dir, c);
                    REQUIRE(got == expect - t);
                    if (got > n.slot_ticks()) ++over;
                }
                CHECK(over == 0);
            }
        }
    }
}

}
