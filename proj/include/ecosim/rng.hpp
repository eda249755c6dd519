#pragma once

#include <cstdint>
#include <random>

namespace ecosim {

/// Seed for a simulation trace. Equal seeds and equal configs give bit-identical traces.
struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

/// SplitMix64 finaliser, used to derive independent per-replicate / per-consumer seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seed for stream `index` of `master`. Distinct indices give decorrelated streams.
RngSeed derive_seed(RngSeed master, std::uint64_t index) noexcept;

/// Deterministic random stream.
///
/// The engine is mt19937_64, whose output sequence is fixed by the standard. The
/// std:: distributions are implementation-defined, so every draw the simulator
/// makes goes through the members below instead.
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(mix_seed(seed.value)), origin_(seed.value) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n), n > 0 (Lemire's unbiased multiply-shift).
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi);

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal variate (Marsaglia polar method).
    double normal();

    /// Child stream; does not advance this stream.
    Rng split(std::uint64_t stream) const;

private:
    std::mt19937_64 engine_;
    std::uint64_t origin_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ecosim
