#pragma once

#include <array>
#include <cstdint>

namespace smde {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The output block is a pure function of (key, counter), so any stream can
/// be positioned without generating its predecessors.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// A reproducible stream of random numbers identified by (seed, stream id).
///
/// Streams with different ids never overlap: the id occupies the upper half of
/// the 128-bit Philox counter and the draw index the lower half.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open() noexcept;

  /// Exp(rate) draw by inversion.
  double exponential(double rate) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t position() const noexcept { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t index_ = 0;  // next 128-bit block
  Philox4x32::Counter buffer_{};
  int buffered_ = 0;  // remaining 64-bit words in buffer_
};

/// Stream id reserved for auxiliary draws (e.g. NCE noise) of replication `k`.
constexpr std::uint64_t auxiliary_stream(std::uint64_t k) noexcept {
  return k | (std::uint64_t{1} << 63);
}

}  // namespace smde
