#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "anovapde/parallel.hpp"

namespace anovapde {

/// Sum and sum of squares in long double; merged in a fixed order for reproducibility.
struct Accumulator {
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    long count = 0;

    void add(double x) {
        sum += x;
        sum_sq += static_cast<long double>(x) * x;
        ++count;
    }
    void merge(const Accumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    double mean() const { return count ? static_cast<double>(sum / count) : 0.0; }
    double variance() const {
        if (count < 2) return 0.0;
        const long double m = sum / count;
        return static_cast<double>(std::max<long double>((sum_sq - count * m * m) / (count - 1), 0.0L));
    }
    double std_error() const { return count ? std::sqrt(variance() / count) : 0.0; }
};

struct PriceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long paths = 0;
};

inline PriceEstimate to_estimate(const Accumulator& a, double scale = 1.0) {
    return PriceEstimate{a.mean() * scale, a.std_error() * std::abs(scale), a.count};
}

constexpr long kBatchSize = 4096;

/// Runs body(first, last, acc) over fixed-size batches of path indices and merges the
/// per-batch accumulators in batch order, so the result does not depend on `threads`.
template <class Body>
std::vector<Accumulator> run_batches(long paths, int threads, std::size_t width, Body&& body) {
    const long batches = (paths + kBatchSize - 1) / kBatchSize;
    std::vector<std::vector<Accumulator>> parts(static_cast<std::size_t>(batches),
                                                std::vector<Accumulator>(width));
    parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b) {
        const long first = static_cast<long>(b) * kBatchSize;
        const long last = std::min(paths, first + kBatchSize);
        body(first, last, parts[b]);
    });
    std::vector<Accumulator> total(width);
    for (const auto& p : parts)
        for (std::size_t k = 0; k < width; ++k) total[k].merge(p[k]);
    return total;
}

}  // namespace anovapde
