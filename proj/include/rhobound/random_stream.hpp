#pragma once

#include <cstdint>
#include <vector>

namespace rhobound {

// Counter-based splittable stream. Every output is a pure function of
// (master_seed, replicate_index, cursor): replicate streams are derived by
// keyed mixing, never by jumping ahead in a single sequence, so any subset of
// replicates can be drawn independently and in parallel with identical
// results.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t replicate_index);

  std::uint64_t next_u64();

  // Strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53, so the extreme values
  // are 2^-54 and 1 - 2^-54 and neither endpoint is ever returned.
  double next_uniform();

  // Inverse-CDF transform of next_uniform(); platform-stable and monotone in
  // the underlying uniform, which the coupling constructions rely on.
  double next_normal();

  // Unit-rate gamma, Marsaglia-Tsang squeeze (with the shape<1 boost).
  // Consumes a variable number of raw draws.
  double next_gamma(double shape);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t replicate_index() const { return replicate_; }
  std::uint64_t cursor() const { return cursor_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t replicate_;
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

void draw_uniforms(RandomStream& s, std::size_t n, double* out);
void draw_normals(RandomStream& s, std::size_t n, double* out);
std::vector<double> draw_uniforms(RandomStream& s, std::size_t n);
std::vector<double> draw_normals(RandomStream& s, std::size_t n);

}  // namespace rhobound
