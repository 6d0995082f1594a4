#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "nrlat/errors.hpp"
#include "nrlat/latency.hpp"

using namespace nrlat;

namespace {

struct Cell {
    NumerologyProfile num;
    ControlConfig ctrl;
    ProcessingTimes proc;
    SlotGrid ul;
    SlotGrid dl;
    ControlPlane cp;

    explicit Cell(int scs = 30, ControlVariant v = ControlVariant::Conf3, SlotType type = SlotType::Full,
                  int n_ue = 100)
        : num(NumerologyProfile::for_scs(scs)), ctrl(ControlConfig::make(v, num)),
          proc(PhyTables::standard().processing_times(num.mu(), 2)),
          ul(num, Direction::Uplink, PhyTables::standard().total_rbs(20, scs), ctrl, type),
          dl(num, Direction::Downlink, PhyTables::standard().total_rbs(20, scs), ctrl, type), cp(num, ctrl, proc, n_ue)
    {
    }
    SlotGrid& grid(Direction d) { return d == Direction::Uplink ? ul : dl; }
};

}  // namespace

TEST_SUITE("latency") {

TEST_CASE("semi-static single packet on an empty grid")
{
    for (auto d : {Direction::Uplink, Direction::Downlink}) {
        Cell c;
        const Tick ready = 1000;
        const auto b = latency_semistatic(1, d, ready, 3, c.grid(d), c.proc);
        CHECK(b.t_sch == 0);
        CHECK(b.t_w == 0);
        CHECK(b.t_p_tx == c.proc.t_proc2 / 2);
        CHECK(b.t_p_rx == c.proc.t_proc1 / 2);
        CHECK(b.t_fa == frame_alignment(ready + b.t_p_tx, c.num, SlotType::Full, d, c.ctrl));
        CHECK(b.t_tt == c.grid(d).transmission_symbols() * c.num.symbol_ticks());
        CHECK(b.total == b.component_sum());
    }
}

TEST_CASE("k-repetition delta is exactly (k-1) slots")
{
    for (int scs : {15, 30, 60}) {
        for (int k : {2, 4, 8}) {
            Cell a(scs), b(scs);
            SchemeConfig one;
            SchemeConfig rep;
            rep.retransmission = Retransmission::KRepetitions;
            rep.k = k;
            Rng r1(1), r2(1);
            LegEnv e1{a.ul, nullptr, one, a.proc, 0.0, r1, nullptr};
            LegEnv e2{b.ul, nullptr, rep, b.proc, 0.0, r2, nullptr};
            const Tick t0 = 777;
            const auto x = run_leg({1, Direction::Uplink, t0, 4, 1, kNever}, e1).breakdown();
            const auto y = run_leg({1, Direction::Uplink, t0, 4, 1, kNever}, e2).breakdown();
            CHECK(y.total - x.total == (k - 1) * a.num.slot_ticks());
            CHECK(y.t_rep == (k - 1) * a.num.slot_ticks());
            const auto z = apply_k_repetitions(x, k, a.num.slot_ticks());
            CHECK(z.total == y.total);
        }
    }
    CHECK_THROWS_AS(apply_k_repetitions(LatencyBreakdown{}, 3, 10), ConfigError);
}

TEST_CASE("HARQ n=3 at BLER 0.1 delivers 1 - 0.1^4 of packets")
{
    SchemeConfig s;
    s.scheduling = Scheduling::SemiStatic;
    s.retransmission = Retransmission::Harq;
    s.max_n = 3;
    Rng rng(2024);
    const int trials = 1000000;
    int delivered = 0;
    int max_attempts = 0;
    for (int i = 0; i < trials; ++i) {
        Cell c;
        LegEnv env{c.ul, &c.cp, s, c.proc, 0.1, rng, nullptr};
        const auto leg = run_leg({1, Direction::Uplink, 0, 3, 1, kNever}, env);
        if (leg.disposition() == Disposition::Delivered) ++delivered;
        max_attempts = std::max(max_attempts, leg.breakdown().n_attempts);
    }
    const double p = 1.0 - std::pow(0.1, 4);
    const double sigma = std::sqrt(p * (1 - p) / trials);
    const double got = static_cast<double>(delivered) / trials;
    MESSAGE("HARQ delivery " << got << " expected " << p << " sigma " << sigma);
    CHECK(std::abs(got - p) <= 3 * sigma);
    CHECK(max_attempts == 4);
    SchemeConfig h;
    h.retransmission = Retransmission::Harq;
    h.max_n = 3;
    CHECK(reliability_bound(0.1, h) == doctest::Approx(0.9999));
}

TEST_CASE("one injected failure adds exactly one NACK + scheduling + transmission cycle")
{
    for (auto d : {Direction::Uplink, Direction::Downlink}) {
        SchemeConfig s;
        s.retransmission = Retransmission::Harq;
        s.max_n = 3;
        Cell c;
        Rng rng(1);
        const OutcomeFn fail_first = [](int attempt, int) { return attempt == 0; };
        LegEnv env{c.grid(d), &c.cp, s, c.proc, 0.0, rng, &fail_first};
        const auto leg = run_leg({1, d, 0, 3, 1, kNever}, env);
        REQUIRE(leg.disposition() == Disposition::Delivered);
        const auto& b = leg.breakdown();
        CHECK(b.n_attempts == 2);

        // Rebuild the second cycle from its parts on a fresh cell.
        Cell f;
        Rng r2(1);
        const OutcomeFn never = [](int, int) { return false; };
        SchemeConfig none;
        LegEnv e1{f.grid(d), &f.cp, none, f.proc, 0.0, r2, &never};
        const auto first = run_leg({1, d, 0, 3, 1, kNever}, e1).breakdown();
        const Tick end1 = first.end();
        const ControlStep nack = f.cp.nack_step(d, end1);
        Tick t = end1 + nack.total();
        Tick sched = 0;
        if (d == Direction::Uplink) {
            // Conf3: SR opportunity every slot, no wait.
            const ControlStep sr = f.cp.sr_step(t, 0.5);
            sched += sr.total();
        }
        sched += f.cp.grant_step(t + sched).total();
        const auto step = find_packet_step(f.grid(d), t + sched, 3, 1, f.proc);
        REQUIRE(step);
        CHECK(b.total == first.total + nack.total() + sched + step->total());
        CHECK(b.t_retx_total == nack.total() + sched + step->total());
        CHECK(b.total == b.component_sum());
    }
}

TEST_CASE("t_fa never exceeds a slot, components always sum to the total")
{
    std::mt19937_64 rng(4);
    for (int scs : {15, 30, 60}) {
        for (auto type : {SlotType::Full, SlotType::Mini7, SlotType::Mini4}) {
            for (auto v : {ControlVariant::Conf1, ControlVariant::Conf3}) {
                Cell c(scs, v, type, 200);
                Rng r(9);
                SchemeConfig s;
                s.scheduling = (rng() & 1) ? Scheduling::Dynamic : Scheduling::SemiStatic;
                s.slot_type = type;
                Tick t = 0;
                for (int i = 0; i < 400; ++i) {
                    t += static_cast<Tick>(rng() % 3000);
                    const Direction d = (rng() & 1) ? Direction::Uplink : Direction::Downlink;
                    const int n = 1 + static_cast<int>(rng() % std::min(6, c.grid(d).max_rbs()));
                    // Legs are run one at a time, so DCIs arrive in order only if starts grow.
                    LegEnv env{c.grid(d), &c.cp, s, c.proc, 0.0, r, nullptr};
                    const auto leg = run_leg({static_cast<std::uint64_t>(i), d, t, n, 1, kNever}, env);
                    const auto& b = leg.breakdown();
                    CHECK(b.t_fa >= 0);
                    CHECK(b.t_fa <= c.num.slot_ticks());
                    CHECK(b.t_w >= 0);
                    CHECK(b.total == b.component_sum());
                    t = std::max(t, b.start + b.t_sch);
                }
            }
        }
    }
}

TEST_CASE("dynamic scheduling costs more than configured grant")
{
    Cell a, b;
    Rng r(3);
    const auto semi = latency_semistatic(1, Direction::Uplink, 500, 3, a.ul, a.proc);
    const auto dyn = latency_dynamic(1, Direction::Uplink, 500, 3, b.ul, b.cp, b.proc, r);
    CHECK(dyn.total > semi.total);
    CHECK(dyn.t_sch > 0);
    CHECK(dyn.total == dyn.component_sum());
}

TEST_CASE("deadline drops without committing")
{
    Cell c;
    for (int i = 0; i < 200; ++i) c.ul.allocate(i, c.ul.max_rbs(), 0);
    SchemeConfig s;
    Rng r(1);
    LegEnv env{c.ul, nullptr, s, c.proc, 0.0, r, nullptr};
    const auto leg = run_leg({1, Direction::Uplink, 0, 3, 1, from_ms(20)}, env);
    CHECK(leg.disposition() == Disposition::Dropped);
    CHECK(leg.placements().empty());
}

TEST_CASE("unicast DL latency is the worst receiver")
{
    std::vector<LatencyBreakdown> v(4);
    v[0].total = 10;
    v[1].total = 40;
    v[2].total = 25;
    v[3].total = 39;
    CHECK(unicast_dl_latency(v, 4) == 40);
    CHECK_THROWS(unicast_dl_latency(v, 3));
    CHECK_THROWS(unicast_dl_latency({}, 0));
}

TEST_CASE("abort cancels a booked leg until its first copy is on air")
{
    Cell c;
    SchemeConfig s;
    Rng r(1);
    LegEnv env{c.dl, nullptr, s, c.proc, 0.0, r, nullptr};
    LegProcess leg({1, Direction::Downlink, 0, 5, 1, kNever});
    Tick now = 0;
    while (auto n = leg.advance(env, now)) now = *n;
    REQUIRE(leg.finished());
    const Placement p = leg.placements().front();
    CHECK_FALSE(c.dl.is_free(p.slot, p.first_symbol, p.first_rb));

    // On air: nothing to cancel.
    leg.abort(c.dl, p.start);
    CHECK(leg.disposition() == Disposition::Delivered);
    CHECK_FALSE(c.dl.is_free(p.slot, p.first_symbol, p.first_rb));

    // Booked for later: released and dropped.
    LegProcess late({2, Direction::Downlink, 0, 5, 1, kNever});
    now = 0;
    while (auto n = late.advance(env, now)) now = *n;
    const Placement q = late.placements().front();
    REQUIRE(q.start > 0);
    late.abort(c.dl, q.start - 1);
    CHECK(late.disposition() == Disposition::Dropped);
    CHECK(late.placements().empty());
    CHECK(c.dl.is_free(q.slot, q.first_symbol, q.first_rb));
    late.abort(c.dl, q.start);
    CHECK(late.disposition() == Disposition::Dropped);
}

TEST_CASE("breakdown CSV")
{
    std::ostringstream os;
    write_breakdown_csv_header(os);
    LatencyBreakdown b;
    b.total = kTicksPerMs;
    b.t_tt = kTicksPerMs;
    write_breakdown_csv_row(os, 3, b, Disposition::Delivered);
    CHECK(os.str().find("3,UL,0,0,0,0,1,0,0,0,0,1,delivered") != std::string::npos);
}

}
