// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace abp {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Point in R^3; 2D shapes ignore z (kept at 0).
struct Vec {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec operator*(double s, Vec a) { return {s * a.x, s * a.y, s * a.z}; }
    double dot(Vec o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dist2(Vec a, Vec b) { return (a - b).norm2(); }
inline double dist(Vec a, Vec b) { return std::sqrt(dist2(a, b)); }

/// Worker cap: min(hardware_concurrency, ABP_LAB_WORKERS). At least 1.
inline int max_workers() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("ABP_LAB_WORKERS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1 && cap < hw) hw = static_cast<int>(cap);
    }
    return hw;
}

/// Run fn(begin, end) over a partition of [0, n). Chunks are disjoint, so
/// callers that write to per-index slots get results independent of the
/// worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    int w = max_workers();
    if (n == 0) return;
    if (w <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    std::size_t nchunks = std::min<std::size_t>(static_cast<std::size_t>(w), n);
    std::size_t chunk = (n + nchunks - 1) / nchunks;
    std::vector<std::thread> pool;
    pool.reserve(nchunks);
    for (std::size_t c = 0; c < nchunks; ++c) {
        std::size_t b = c * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace abp
