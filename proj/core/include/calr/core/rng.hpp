#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace calr {

/// Seed plus stream id; equal states replay identical draw sequences.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool operator==(const RngState&) const = default;
};

/// Named, splittable random stream.
///
/// The engine is std::mt19937_64 (fully specified by the standard). The
/// conversions to uniform and normal variates are implemented here rather
/// than with <random> distributions, whose output is implementation-defined,
/// so draws are identical across standard libraries.
class Rng {
public:
  explicit Rng(RngState state);
  Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngState{seed, stream}) {}

  [[nodiscard]] const RngState& state() const { return state_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal (Box-Muller).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

  /// Independent child stream derived from this stream's identity, not its position.
  [[nodiscard]] Rng split(std::uint64_t child) const;

private:
  RngState state_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Well-known stream ids, so every stochastic choice is traceable.
namespace streams {
inline constexpr std::uint64_t kSynthIdentities = 1;
inline constexpr std::uint64_t kSynthCameras = 2;
inline constexpr std::uint64_t kSynthSamples = 3;
inline constexpr std::uint64_t kSplit = 4;
inline constexpr std::uint64_t kModelInit = 10;
inline constexpr std::uint64_t kStage1 = 20;
inline constexpr std::uint64_t kStage2Batches = 30;
inline constexpr std::uint64_t kRefinement = 31;
inline constexpr std::uint64_t kInfomap = 32;
}  // namespace streams

}  // namespace calr
