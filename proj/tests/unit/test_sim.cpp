#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nrlat/sim_engine.hpp"

using namespace nrlat;

namespace {

SimConfig short_run()
{
    SimConfig c;
    c.density = 20;
    c.traffic.period_ms = 20;
    c.warmup_ms = 100;
    c.horizon_ms = 600;
    c.min_replications = 3;
    c.max_replications = 3;
    return c;
}

MetricsReport with_samples(const std::vector<double>& ms, int dropped)
{
    MetricsReport r;
    for (double x : ms) r.latency.add(from_ms(x));
    r.latency.add_infinite(static_cast<std::uint64_t>(dropped));
    return r;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("same seed, same report; worker count does not matter")
{
    SimConfig c = short_run();
    const auto a = run(c, 11);
    const auto b = run(c, 11);
    c.workers = 3;
    const auto d = run(c, 11);
    CHECK(a.latency == b.latency);
    CHECK(a.latency == d.latency);
    CHECK(a.mean_l_radio_ms == d.mean_l_radio_ms);
    CHECK(a.rb_utilization_ul == d.rb_utilization_ul);
    CHECK(a.generated == d.generated);
    const auto e = run(short_run(), 12);
    CHECK_FALSE(a.latency == e.latency);
}

TEST_CASE("every packet has exactly one disposition")
{
    for (auto sched : {Scheduling::SemiStatic, Scheduling::Dynamic}) {
        SimConfig c = short_run();
        c.scheme.scheduling = sched;
        c.density = 60;
        const auto r = run_replication(c, 3, 0);
        CHECK(r.generated > 0);
        CHECK(r.generated == r.delivered + r.dropped + r.failed);
        CHECK(r.latency.finite_count() == r.delivered);
        CHECK(r.latency.infinite_count() == r.dropped);
    }
}

TEST_CASE("aggregate of one replication is the replication")
{
    const auto rep = run_replication(short_run(), 5, 0);
    const auto r = aggregate({rep});
    CHECK(r.latency == rep.latency);
    CHECK(r.mean_l_radio_ms == doctest::Approx(rep.mean_ms).epsilon(1e-12));
    CHECK(r.generated == rep.generated);
    CHECK(r.replications == 1);

    const auto twice = aggregate({rep, rep});
    CHECK(twice.mean_l_radio_ms == doctest::Approx(r.mean_l_radio_ms).epsilon(1e-12));
    CHECK(twice.p90_ms == r.p90_ms);
    CHECK(twice.drop_fraction == r.drop_fraction);
    CHECK(twice.ci_relative_error == 0.0);
    CHECK(std::isinf(r.ci_relative_error));
    CHECK_THROWS(aggregate({}));
}

TEST_CASE("pooled percentile equals the percentile of the concatenated samples")
{
    std::mt19937_64 rng(8);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<ReplicationResult> reps(1 + rng() % 4);
        std::vector<double> all;
        for (auto& rep : reps) {
            const int n = 1 + static_cast<int>(rng() % 100);
            for (int i = 0; i < n; ++i) {
                if (rng() % 50 == 0) {
                    rep.latency.add_infinite();
                    all.push_back(std::numeric_limits<double>::infinity());
                } else {
                    const Tick t = 1000 + static_cast<Tick>(rng() % 20000);
                    rep.latency.add(t);
                    all.push_back(to_ms(t));
                }
            }
        }
        std::sort(all.begin(), all.end());
        const auto r = aggregate(reps);
        for (double q : {0.9, 0.9999}) {
            // nearest rank: smallest sample with at least q of the set at or below it
            std::size_t i = 0;
            while (static_cast<double>(i + 1) < q * static_cast<double>(all.size()) - 1e-9) ++i;
            CHECK(r.latency_at_percentile(q) == all[i]);
        }
    }
}

TEST_CASE("requirement checks")
{
    std::vector<double> s(100, 1.0);
    for (int i = 85; i < 100; ++i) s[i] = 6.8;
    auto r = with_samples(s, 0);
    CHECK(r.latency_at_percentile(0.9) == doctest::Approx(6.8).epsilon(1e-3));
    auto q = check_requirement(r, Service::LLoA);
    CHECK(q.pass);
    CHECK(q.margin_ms == doctest::Approx(23.0 - 6.8).epsilon(1e-3));

    auto dropped = with_samples(std::vector<double>(89, 1.0), 11);
    auto d = check_requirement(dropped, Service::LLoA);
    CHECK_FALSE(d.pass);
    CHECK(std::isinf(d.latency_ms));

    std::vector<double> tail(10000, 2.0);
    tail.back() = 8.5;
    tail[tail.size() - 2] = 8.5;
    auto h = check_requirement(with_samples(tail, 0), Service::HLoA);
    CHECK(h.latency_ms == doctest::Approx(8.5).epsilon(1e-3));
    CHECK_FALSE(h.pass);
}

TEST_CASE("mean latency grows with load and shrinks with bandwidth")
{
    // T_p = 100 ms grids. Under heavy dropping the mean covers only the
    // survivors and need not be monotone.
    for (int m : {4, 6}) {
        SimConfig c = short_run();
        c.scheme.dl_cast = Cast::Unicast;
        c.scheme.m = m;
        c.traffic.period_ms = 100;
        double prev = 0;
        for (double density : {10.0, 20.0, 40.0, 60.0, 80.0}) {
            c.density = density;
            const double mean = run(c, 21).mean_l_radio_ms;
            CHECK(mean >= prev * 0.99);
            prev = mean;
        }
        c.density = 40;
        prev = std::numeric_limits<double>::infinity();
        for (int bw : {10, 20, 30, 40, 50}) {
            c.bw_mhz = bw;
            const double mean = run(c, 21).mean_l_radio_ms;
            CHECK(mean <= prev * 1.01);
            prev = mean;
        }
    }
}

TEST_CASE("HEP costs more latency than LEP at the same load")
{
    SimConfig c = short_run();
    c.scheme.dl_cast = Cast::Unicast;
    c.density = 40;
    const double lep = run(c, 4).mean_l_radio_ms;
    c.scheme.mcs_table = McsTable::HEP;
    const double hep = run(c, 4).mean_l_radio_ms;
    CHECK(hep > lep);
}

TEST_CASE("infeasible points fail loudly")
{
    SimConfig c = short_run();
    c.scs_khz = 60;
    c.bw_mhz = 10;
    c.scheme.slot_type = SlotType::Mini7;
    c.scheme.mcs_table = McsTable::HEP;
    CHECK_THROWS(run(c, 1));
    SimConfig bad = short_run();
    bad.horizon_ms = 50;
    CHECK_THROWS(run(bad, 1));
}

TEST_CASE("report JSON carries the headline numbers")
{
    const auto r = run(short_run(), 2);
    const auto j = report_to_json(r);
    CHECK(j.contains("mean_l_radio_ms"));
    CHECK(j.contains("p90_ms"));
    std::ostringstream log;
    run_replication(short_run(), 2, 0, &log);
    CHECK(log.str().find('\n') != std::string::npos);
}

}
