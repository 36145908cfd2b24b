#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pmrhc {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class Channel : std::uint64_t { Growth = 1, Speed = 2, Location = 3, Shock = 4, Observation = 5 };

// Independent stream per (seed, channel, id); the distributions are implemented here so that
// draws are identical across standard libraries.
class Stream {
public:
    Stream() = default;
    Stream(std::uint64_t seed, Channel channel, std::uint64_t id) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= static_cast<std::uint64_t>(channel) * 0xd1b54a32d192ed03ULL;
        std::uint64_t b = splitmix64(s);
        s ^= (id + 1) * 0x8cb92ba72f3d8dd7ULL;
        engine_.seed(a ^ b ^ splitmix64(s));
    }

    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
    double exponential(double mean) { return -mean * std::log1p(-u01()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace pmrhc
