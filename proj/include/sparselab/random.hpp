#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace sparselab {

struct Seed {
  std::uint64_t value = 0;
};

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates nearby integers.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child stream for work item `index` of a run seeded with `parent`.
inline Seed derive_seed(Seed parent, std::uint64_t index) {
  return Seed{mix64(mix64(parent.value) ^ mix64(index + 0x632be59bd9b4e019ULL))};
}

inline Seed derive_seed(Seed parent, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(parent, a), b);
}

inline Rng make_rng(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.value),
                    static_cast<std::uint32_t>(seed.value >> 32)};
  return Rng(seq);
}

// Column-major fill, so the stream order is the storage order.
inline void fill_standard_normal(Eigen::Ref<Eigen::MatrixXd> out, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = normal(rng);
}

}  // namespace sparselab
