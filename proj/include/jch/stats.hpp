// stats.hpp: renormalized histograms, peak prominence, and seeded Gaussian streams.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace jch {

class Histogram {
public:
    Histogram(double lo, double hi, int bins) : lo_(lo), hi_(hi), prob_(bins, 0.0) {
        if (bins < 1 || !(hi > lo)) throw std::invalid_argument("Histogram: need bins >= 1 and hi > lo");
    }

    /// Values outside [lo, hi] land in the edge bins; hi itself goes to the last bin.
    void add(double value, double weight = 1.0) {
        const int b = static_cast<int>(std::floor((value - lo_) / width()));
        prob_[std::clamp(b, 0, bins() - 1)] += weight;
    }

    void normalize() {
        const double s = std::accumulate(prob_.begin(), prob_.end(), 0.0);
        if (s > 0.0)
            for (auto& p : prob_) p /= s;
    }

    int bins() const noexcept { return static_cast<int>(prob_.size()); }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return (hi_ - lo_) / bins(); }
    double center(int b) const { return lo_ + (b + 0.5) * width(); }
    int bin_of(double value) const {
        return std::clamp(static_cast<int>(std::floor((value - lo_) / width())), 0, bins() - 1);
    }
    const std::vector<double>& probabilities() const noexcept { return prob_; }
    double total() const { return std::accumulate(prob_.begin(), prob_.end(), 0.0); }

private:
    double lo_, hi_;
    std::vector<double> prob_;
};

/// Topographic prominence of each local maximum of `y`, with the sequence padded by
/// zeros on both sides so edge bins can be peaks.
struct Peak {
    int index;
    double height;
    double prominence;
};

inline std::vector<Peak> find_peaks(const std::vector<double>& y, double min_prominence) {
    std::vector<double> v;
    v.reserve(y.size() + 2);
    v.push_back(0.0);
    v.insert(v.end(), y.begin(), y.end());
    v.push_back(0.0);
    std::vector<Peak> peaks;
    const int n = static_cast<int>(v.size());
    for (int i = 1; i + 1 < n; ++i) {
        // plateau-aware: i is the left end of a flat run bounded by lower values
        if (!(v[i] > v[i - 1])) continue;
        int j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        if (j + 1 >= n || !(v[j + 1] < v[i])) continue;
        double left_min = v[i], right_min = v[i];
        for (int k = i - 1; k >= 0 && v[k] <= v[i]; --k) left_min = std::min(left_min, v[k]);
        for (int k = j + 1; k < n && v[k] <= v[i]; ++k) right_min = std::min(right_min, v[k]);
        const double prom = v[i] - std::max(left_min, right_min);
        if (prom > min_prominence) peaks.push_back({i - 1, v[i], prom});
        i = j;
    }
    return peaks;
}

/// Deterministic engine for (seed, stream index): draws for one index never depend
/// on how many other indices were processed or in which order.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

inline std::vector<double> standard_normals(std::uint64_t seed, std::uint64_t index, std::size_t count) {
    auto eng = stream_engine(seed, index);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> z(count);
    for (auto& x : z) x = nd(eng);
    return z;
}

}  // namespace jch
