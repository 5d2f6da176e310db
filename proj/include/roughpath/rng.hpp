#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace roughpath {

// Philox4x32-10 counter-based generator. Every 128-bit counter block maps to
// four 32-bit outputs through a pure function of (key, counter), so draw i of
// stream (seed, trajectory, component) can be produced without any shared
// state. This is what makes trajectory-parallel Monte Carlo bit-reproducible
// regardless of scheduling.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_hi_(stream_hi),
        stream_lo_(stream_lo) {}

  Block block(std::uint64_t index) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(index);
    std::uint32_t c1 = static_cast<std::uint32_t>(index >> 32);
    std::uint32_t c2 = stream_lo_;
    std::uint32_t c3 = stream_hi_;
    std::uint32_t k0 = key0_;
    std::uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = kMul0 * static_cast<std::uint64_t>(c0);
      const std::uint64_t p1 = kMul1 * static_cast<std::uint64_t>(c2);
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return {c0, c1, c2, c3};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t key0_, key1_;
  std::uint32_t stream_hi_, stream_lo_;
};

// Standard-normal stream keyed by (seed, trajectory, component). Each counter
// block yields two uniforms in (0,1) and, via Box-Muller, two normals; draw i
// therefore lives in block i/2 and is addressable at random.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t component)
      : gen_(seed, trajectory, component) {}

  double normal(std::uint64_t i) const {
    const auto b = gen_.block(i >> 1);
    const double u1 = to_open_unit(join(b[0], b[1]));
    const double u2 = to_open_unit(join(b[2], b[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    return (i & 1u) ? r * std::sin(a) : r * std::cos(a);
  }

  void fill_normals(std::vector<double>& out, std::size_t n) const {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = normal(i);
  }

  double uniform(std::uint64_t i) const {
    const auto b = gen_.block(i >> 1);
    return (i & 1u) ? to_open_unit(join(b[2], b[3])) : to_open_unit(join(b[0], b[1]));
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }
  // (0,1), never exactly 0 or 1, so log() is always finite.
  static double to_open_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  Philox4x32 gen_;
};

}  // namespace roughpath
