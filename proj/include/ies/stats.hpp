#ifndef IES_STATS_HPP
#define IES_STATS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

namespace ies {

/// Welford accumulator for mean and standard error.
class RunningStats {
public:
    void add(double x) noexcept
    {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
    double std_error() const noexcept
    {
        return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Unit-bin 2D histogram on the integer lattice.
using Histogram2D = std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t>;

/// Plug-in Shannon entropy (bits) of observed bin frequencies.
template <class Map>
double plugin_entropy(const Map& counts)
{
    double total = 0.0;
    for (const auto& [bin, count] : counts) {
        total += static_cast<double>(count);
    }
    if (total == 0.0) {
        return 0.0;
    }
    double h = 0.0;
    for (const auto& [bin, count] : counts) {
        if (count == 0) continue;
        const double f = static_cast<double>(count) / total;
        h -= f * std::log2(f);
    }
    return h;
}

} // namespace ies

#endif // IES_STATS_HPP
