#include "rhobound/random_stream.hpp"

#include <cmath>
#include <stdexcept>

#include "rhobound/special_functions.hpp"

namespace rhobound {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t replicate_index)
    : master_seed_(master_seed), replicate_(replicate_index) {
  key_ = mix64(master_seed + kGolden * mix64(replicate_index + kGolden));
}

std::uint64_t RandomStream::next_u64() {
  return mix64(key_ + (++cursor_) * kGolden);
}

double RandomStream::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  return std_normal_quantile(next_uniform());
}

double RandomStream::next_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("next_gamma: shape must be > 0");
  if (shape < 1.0) {
    const double u = next_uniform();
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double x = next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = next_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void draw_uniforms(RandomStream& s, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s.next_uniform();
}

void draw_normals(RandomStream& s, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s.next_normal();
}

std::vector<double> draw_uniforms(RandomStream& s, std::size_t n) {
  std::vector<double> v(n);
  draw_uniforms(s, n, v.data());
  return v;
}

std::vector<double> draw_normals(RandomStream& s, std::size_t n) {
  std::vector<double> v(n);
  draw_normals(s, n, v.data());
  return v;
}

}  // namespace rhobound
