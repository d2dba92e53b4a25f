#pragma once

#include <array>
#include <cstdint>

namespace adaptis {

/// Counter-based Philox4x64-10 generator.
///
/// The stream is fully determined by the 128-bit key; the counter walks the
/// stream. `split` derives an independent child key, so replications and
/// auxiliary batches get reproducible, non-overlapping streams without shared
/// state. Identical (seed, stream) pairs produce bit-identical output.
class Rng {
public:
    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Raw Philox4x64-10 bijection; exposed for known-answer testing.
    static Block philox(Block counter, Key key) noexcept;

    /// Child generator with a key derived from this key and `stream_id`.
    Rng split(std::uint64_t stream_id) const;

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Exact standard normal variate (Box-Muller, second value cached).
    double normal() noexcept;

    const Key& key() const noexcept { return key_; }

private:
    Rng(Key key, int) : key_(key) {}
    void refill() noexcept;

    Key key_{};
    Block counter_{};
    Block buffer_{};
    int buffer_pos_ = 4;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

/// SplitMix64 finalizer; used to derive keys and per-replication seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace adaptis
