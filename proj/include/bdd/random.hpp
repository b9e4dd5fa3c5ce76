#pragma once

#include <array>
#include <cstdint>

namespace bdd {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed `index` of `master`. Distinct indices give unrelated seeds.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Counter-based stream: the output depends only on (key, stream, position),
/// so any stream can be regenerated independently of thread scheduling.
class CounterRng {
public:
  CounterRng(std::uint64_t key, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Gamma(shape, 1) by the Marsaglia-Tsang squeeze; shape < 1 uses the
/// U^(1/shape) boost.
double gamma_variate(CounterRng& rng, double shape);

/// Beta(a, b) as G_a / (G_a + G_b).
double beta_variate(CounterRng& rng, double a, double b);

}  // namespace bdd
