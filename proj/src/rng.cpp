#include "recest/rng.hpp"

#include <cmath>
#include <numbers>

namespace recest {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;  // 2^-53
} // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next_u64() noexcept {
    state_ += kGolden;
    return splitmix64_mix(state_);
}

double SplitMix64::uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kTwoPow53Inv;
}

double SplitMix64::normal() noexcept {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
}

double SplitMix64::cauchy(double location) noexcept {
    return cauchy_quantile(location, uniform01());
}

double cauchy_quantile(double location, double u) noexcept {
    return location + std::tan(std::numbers::pi * (u - 0.5));
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept {
    return splitmix64_mix(master + (rep + 1) * kGolden);
}

} // namespace recest
