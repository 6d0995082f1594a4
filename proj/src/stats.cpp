#include "nrlat/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

namespace nrlat {

void LatencyHistogram::add(Tick t, std::uint64_t n)
{
    counts_[t] += n;
    finite_ += n;
    sum_ += static_cast<long double>(t) * n;
}

void LatencyHistogram::merge(const LatencyHistogram& other)
{
    for (const auto& [t, n] : other.counts_) counts_[t] += n;
    finite_ += other.finite_;
    infinite_ += other.infinite_;
    sum_ += other.sum_;
}

Tick LatencyHistogram::quantile(double q) const
{
    const std::uint64_t n = count();
    if (n == 0) return kNever;
    auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    rank = std::max<std::uint64_t>(rank, 1);
    if (rank > finite_) return kNever;
    std::uint64_t seen = 0;
    for (const auto& [t, c] : counts_) {
        seen += c;
        if (seen >= rank) return t;
    }
    return kNever;
}

double LatencyHistogram::mean_ms() const
{
    if (finite_ == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(sum_ / finite_) / static_cast<double>(kTicksPerMs);
}

std::uint64_t LatencyHistogram::count_at_most(Tick t) const
{
    std::uint64_t n = 0;
    for (auto it = counts_.begin(); it != counts_.end() && it->first <= t; ++it) n += it->second;
    return n;
}

Tick LatencyHistogram::max_finite() const { return counts_.empty() ? 0 : counts_.rbegin()->first; }

double student_t_975(int df)
{
    if (df < 1) return std::numeric_limits<double>::infinity();
    boost::math::students_t dist(df);
    return boost::math::quantile(dist, 0.975);
}

double ConfidenceInterval::relative_error() const
{
    if (mean == 0.0) return std::numeric_limits<double>::infinity();
    return half_width / std::abs(mean);
}

ConfidenceInterval confidence_interval(const std::vector<double>& samples)
{
    ConfidenceInterval ci;
    const std::size_t n = samples.size();
    if (n == 0) {
        ci.mean = std::numeric_limits<double>::quiet_NaN();
        ci.half_width = std::numeric_limits<double>::infinity();
        return ci;
    }
    double s = 0.0;
    for (double x : samples) s += x;
    ci.mean = s / n;
    if (n < 2) {
        ci.half_width = std::numeric_limits<double>::infinity();
        return ci;
    }
    double ss = 0.0;
    for (double x : samples) ss += (x - ci.mean) * (x - ci.mean);
    const double sd = std::sqrt(ss / (n - 1));
    ci.half_width = student_t_975(static_cast<int>(n - 1)) * sd / std::sqrt(static_cast<double>(n));
    return ci;
}

}  // namespace nrlat
