#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>

namespace gnm {

// splitmix64 (Steele/Lea/Flood). Counter-based, 64-bit state, trivial to
// reproduce in any language, which is what keeps generated datasets and
// fold assignments identical across implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n); n must be nonzero
    std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

// Independent substream from a root seed. Stream ids are fixed constants at
// each call site, so every random quantity in a run is a pure function of
// the single user-facing seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    g.next();
    return g.next();
}

// 17 significant digits round-trip any finite IEEE-754 double.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// Strict full-token parse; locale-independent.
inline bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Runs fn(0..n_tasks-1) on up to GNM_THREADS workers (0 or unset = number of
// hardware threads). Tasks must only write to their own output slots; the
// caller then reduces in index order, so results do not depend on the worker
// count.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& fn);

// Worker cap from GNM_THREADS, clamped to [1, n_tasks].
std::size_t worker_count(std::size_t n_tasks);

}  // namespace gnm
