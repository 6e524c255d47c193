#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace svasym {

/// Philox4x64-10 counter-based generator. A stream is identified by (seed, stream id),
/// used as the key; successive draws advance a 64-bit block counter.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using block_type = std::array<std::uint64_t, 4>;
  using key_type = std::array<std::uint64_t, 2>;

  Philox4x64(std::uint64_t seed, std::uint64_t stream) noexcept : key_{seed, stream} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      block_ = generate(block_counter_++);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  /// Raw block for counter c.
  block_type generate(std::uint64_t c) const noexcept { return rounds({c, 0, 0, 0}, key_); }

  static block_type rounds(block_type ctr, key_type key) noexcept {
    constexpr std::uint64_t m0 = 0xD2E7470EE14C6C93ull, m1 = 0xCA5A826395121157ull;
    constexpr std::uint64_t w0 = 0x9E3779B97F4A7C15ull, w1 = 0xBB67AE8584CAA73Bull;
    std::uint64_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint64_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < 10; ++r) {
      const unsigned __int128 p0 = static_cast<unsigned __int128>(m0) * c0;
      const unsigned __int128 p1 = static_cast<unsigned __int128>(m1) * c2;
      c0 = static_cast<std::uint64_t>(p1 >> 64) ^ c1 ^ k0;
      c2 = static_cast<std::uint64_t>(p0 >> 64) ^ c3 ^ k1;
      c1 = static_cast<std::uint64_t>(p1);
      c3 = static_cast<std::uint64_t>(p0);
      k0 += w0;
      k1 += w1;
    }
    return {c0, c1, c2, c3};
  }

 private:
  key_type key_;
  std::uint64_t block_counter_ = 0;
  block_type block_{};
  int pos_ = 4;
};

}  // namespace svasym
