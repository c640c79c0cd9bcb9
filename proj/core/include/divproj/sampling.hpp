#pragma once

#include "divproj/families.hpp"
#include "divproj/projection.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace divproj {

/// Each draw is independently replaced by `outlier_symbol` with probability `rate`.
struct Contamination {
  double rate = 0.0;
  std::size_t outlier_symbol = 0;
};

/// Uniform double in [0, 1) from the top 53 bits, so streams are identical
/// across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw of one symbol.
std::size_t draw_symbol(const Distribution& p, std::mt19937_64& rng);

/// n i.i.d. draws from P, with optional contamination. Deterministic in seed.
SampleData sample_distribution(const Distribution& p, std::size_t n,
                               const std::optional<Contamination>& contamination,
                               std::uint64_t seed);

/// n draws from P_θ.
SampleData sample_generator(const FamilySpec& spec, const Vector& theta, std::size_t n,
                            const std::optional<Contamination>& contamination,
                            std::uint64_t seed);

/// Hit-and-run walk inside the linear family starting from a member `start`:
/// each step moves along a random direction of the constraint null space
/// (restricted to Supp(L)) by a uniform fraction of the feasible segment.
Distribution random_member(const LinearFamilySpec& l, const Distribution& start,
                           std::mt19937_64& rng, int steps = 8);

}  // namespace divproj
