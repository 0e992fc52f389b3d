#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace avseq {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Streams are pure functions of (key, counter), so replications can be
// assigned disjoint counter blocks and reproduced bit-identically on any
// platform.
class Philox {
 public:
  explicit Philox(std::uint64_t key, std::uint64_t counter_hi = 0)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(counter_hi),
                 static_cast<std::uint32_t>(counter_hi >> 32)} {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      block_ = round10(counter_, key_);
      advance_counter();
      pos_ = 0;
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

 private:
  static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);
  void advance_counter() {
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;
    }
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

// Distribution layer on top of Philox. Gaussian draws use Box-Muller with
// both outputs consumed in order; Gamma uses Marsaglia-Tsang; Beta is the
// ratio of two Gamma draws. These choices are fixed so that streams are
// identical across platforms and releases.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(seed, stream) {}

  // Derives an independent generator for replication `rep` of scenario
  // `scenario_id` under a master seed: disjoint counter blocks per rep.
  static Rng derive(std::uint64_t master_seed, std::uint64_t scenario_id, std::uint64_t rep);

  std::uint64_t next_u64() { return engine_.next_u64(); }

  // Uniform on (0,1]; never returns 0 so log() is always safe.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gaussian();
  double gaussian(double mu, double sigma) { return mu + sigma * gaussian(); }
  double gamma(double shape);
  double beta(double a, double b);
  // Index into a finite probability vector (probabilities must sum to 1).
  int categorical(const std::vector<double>& probs);

 private:
  Philox engine_;
  double cached_gaussian_ = 0;
  bool has_cached_gaussian_ = false;
};

// 64-bit mixing used to derive scenario ids from strings (FNV-1a + splitmix
// finalizer). Stable across platforms.
std::uint64_t hash64(const std::string& s);

}  // namespace avseq
