#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nrlat/units.hpp"

namespace nrlat {

/// Exact multiset of latencies in ticks plus a count of infinite samples
/// (dropped packets).
class LatencyHistogram {
  public:
    void add(Tick t, std::uint64_t n = 1);
    void add_infinite(std::uint64_t n = 1) { infinite_ += n; }
    void merge(const LatencyHistogram& other);

    std::uint64_t finite_count() const { return finite_; }
    std::uint64_t infinite_count() const { return infinite_; }
    std::uint64_t count() const { return finite_ + infinite_; }

    /// Nearest-rank q-quantile over finite and infinite samples;
    /// kNever when the rank falls among the infinite ones or the set is empty.
    Tick quantile(double q) const;
    /// Mean over finite samples, in ms (NaN if none).
    double mean_ms() const;
    Tick max_finite() const;
    std::uint64_t count_at_most(Tick t) const;

    bool operator==(const LatencyHistogram&) const = default;

  private:
    std::map<Tick, std::uint64_t> counts_;
    std::uint64_t finite_ = 0;
    std::uint64_t infinite_ = 0;
    long double sum_ = 0.0L;
};

/// Two-sided 95% Student-t critical value for `df` degrees of freedom.
double student_t_975(int df);

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
    double relative_error() const;
};

/// 95% CI of the mean of `samples` (half width +inf for fewer than two samples).
ConfidenceInterval confidence_interval(const std::vector<double>& samples);

}  // namespace nrlat
