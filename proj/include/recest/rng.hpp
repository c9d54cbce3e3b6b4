#pragma once

#include <cstdint>

namespace recest {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Pure bit mixing, no state.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// The single project-wide generator: SplitMix64, 64 bits of state,
/// bit-exact on every platform. Samplers below consume its outputs in a
/// fixed documented order so trajectories replay exactly.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0,1): ((next >> 11) + 0.5) * 2^-53.
    /// Endpoints are unreachable, so tan/log transforms stay finite.
    double uniform01() noexcept;

    /// Standard normal via Box-Muller. Each pair of uniforms yields the
    /// cosine variate first; the sine variate is cached for the next call.
    double normal() noexcept;

    /// Standard Cauchy shifted to `location`: inverse CDF, location + tan(pi(U - 1/2)).
    double cauchy(double location) noexcept;

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Inverse CDF of the Cauchy location family, exposed for direct checks.
double cauchy_quantile(double location, double u) noexcept;

/// Seed for replication `rep` of a Monte Carlo run: the (rep+1)-th output of
/// a SplitMix64 stream seeded with `master`. Computed in closed form as
/// splitmix64_mix(master + (rep+1) * 0x9E3779B97F4A7C15).
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept;

} // namespace recest
