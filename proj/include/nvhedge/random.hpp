#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nvhedge {

// Stream domains keep independent consumers of one user seed apart.
enum class StreamDomain : std::uint64_t {
    RealTerminal = 1,
    RiskNeutralTerminal = 2,
    OuterPaths = 3,
    InnerPaths = 4,
    Calibration = 5,
    Synthetic = 6,
    Strategy = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept {
    std::uint64_t h = splitmix64(seed);
    for (auto id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    return h;
}

// One independent Gaussian stream per (seed, ids...). Draws depend only on the key,
// so results do not depend on which thread evaluates a stream.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t key) : engine_(key) {}
    GaussianStream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
        : engine_(stream_key(seed, ids)) {}

    double operator()() { return normal_(engine_); }
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace nvhedge
