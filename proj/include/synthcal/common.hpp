#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace synthcal {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Error categories map onto CLI exit codes (see tools/synthcal.cpp).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};
struct DivergenceError : Error {
  using Error::Error;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Seeded random stream.
///
/// The standard distributions are implementation-defined, so uniform and
/// normal draws are produced here directly from the 64-bit engine output.
/// That keeps every trajectory identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1), never exactly zero.
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
  }

  /// Standard normal via the Box-Muller transform; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Per-stage seed offsets from the master seed.
namespace seed_offset {
inline constexpr std::uint64_t split = 0;
inline constexpr std::uint64_t noise = 101;
inline constexpr std::uint64_t interpolation = 202;
inline constexpr std::uint64_t gmm_fit = 303;
inline constexpr std::uint64_t gmm_sample = 404;
inline constexpr std::uint64_t cvae_train = 505;
inline constexpr std::uint64_t cvae_sample = 606;
inline constexpr std::uint64_t smote = 707;
inline constexpr std::uint64_t policy = 808;
inline constexpr std::uint64_t classifier = 909;
}  // namespace seed_offset

inline double mean_of(const Vector& v) { return v.size() == 0 ? 0.0 : v.mean(); }

/// Population standard deviation (divides by n).
inline double std_of(const Vector& v) {
  if (v.size() == 0) return 0.0;
  const double mu = v.mean();
  return std::sqrt((v.array() - mu).square().sum() / static_cast<double>(v.size()));
}

}  // namespace synthcal
