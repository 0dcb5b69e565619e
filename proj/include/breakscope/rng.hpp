#ifndef BREAKSCOPE_RNG_HPP
#define BREAKSCOPE_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace breakscope {

/// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; SC'11), the
/// variant shipped as philox4x32 in Random123. Version-pinned: the output of
/// a given (key, counter) never changes.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Sequential stream over the Philox counter space for one 64-bit key.
/// Satisfies UniformRandomBitGenerator; normals use Box-Muller so draws are
/// identical across standard libraries.
class PhiloxStream {
 public:
  using result_type = std::uint32_t;

  explicit PhiloxStream(std::uint64_t key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream for replication `rep` of an experiment seeded with `seed`: key = seed XOR rep.
inline PhiloxStream replication_stream(std::uint64_t seed, std::uint64_t rep) noexcept {
  return PhiloxStream(seed ^ rep);
}

}  // namespace breakscope

#endif  // BREAKSCOPE_RNG_HPP
