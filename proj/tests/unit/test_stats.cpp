#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "nrlat/stats.hpp"

using namespace nrlat;

TEST_SUITE("stats") {

TEST_CASE("nearest-rank quantile equals the sorted concatenation")
{
    std::mt19937_64 rng(1);
    for (int iter = 0; iter < 300; ++iter) {
        LatencyHistogram a, b;
        std::vector<Tick> all;
        const int na = 1 + static_cast<int>(rng() % 200);
        const int nb = static_cast<int>(rng() % 200);
        int inf = 0;
        for (int i = 0; i < na + nb; ++i) {
            auto& h = i < na ? a : b;
            if (rng() % 20 == 0) {
                h.add_infinite();
                all.push_back(kNever);
                ++inf;
            } else {
                const Tick t = static_cast<Tick>(rng() % 50);
                h.add(t);
                all.push_back(t);
            }
        }
        a.merge(b);
        std::sort(all.begin(), all.end());
        for (double q : {0.0, 0.1, 0.5, 0.9, 0.95, 0.9999, 1.0}) {
            std::size_t rank = static_cast<std::size_t>(std::ceil(q * all.size() - 1e-9));
            rank = std::max<std::size_t>(rank, 1);
            CHECK(a.quantile(q) == all[rank - 1]);
        }
        CHECK(a.infinite_count() == static_cast<std::uint64_t>(inf));
    }
}

TEST_CASE("percentile is infinite once drops exceed 1 - q")
{
    LatencyHistogram h;
    h.add(10, 89);
    h.add_infinite(11);
    CHECK(h.quantile(0.90) == kNever);
    LatencyHistogram g;
    g.add(10, 90);
    g.add_infinite(10);
    CHECK(g.quantile(0.90) == 10);
}

TEST_CASE("mean ignores infinite samples")
{
    LatencyHistogram h;
    h.add(from_ms(1.0));
    h.add(from_ms(2.0));
    h.add_infinite(5);
    CHECK(h.mean_ms() == doctest::Approx(1.5));
    CHECK(std::isnan(LatencyHistogram{}.mean_ms()));
    CHECK(h.count_at_most(from_ms(1.0)) == 1);
    CHECK(h.count_at_most(from_ms(3.0)) == 2);
}

TEST_CASE("Student t critical values")
{
    CHECK(student_t_975(1) == doctest::Approx(12.7062).epsilon(1e-4));
    CHECK(student_t_975(9) == doctest::Approx(2.2622).epsilon(1e-4));
    CHECK(student_t_975(100) == doctest::Approx(1.9840).epsilon(1e-4));
}

TEST_CASE("confidence interval")
{
    const auto ci = confidence_interval({1.0, 2.0, 3.0, 4.0});
    CHECK(ci.mean == doctest::Approx(2.5));
    // s = sqrt(5/3), t(3) = 3.1824
    CHECK(ci.half_width == doctest::Approx(3.18245 * std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-4));
    CHECK(ci.relative_error() == doctest::Approx(ci.half_width / 2.5));
    const auto same = confidence_interval({2.0, 2.0, 2.0});
    CHECK(same.half_width == 0.0);
}

}
