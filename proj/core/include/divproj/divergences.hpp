#pragma once

#include "divproj/measures.hpp"

#include <limits>
#include <string_view>

namespace divproj {

enum class DivergenceKind { KL, RenyiD, DensityPowerB, RelAlphaEntropyI };

const char* to_string(DivergenceKind kind);
DivergenceKind parse_divergence_kind(std::string_view name);

/// Value returned by density_power_b when P is not absolutely continuous
/// w.r.t. Q and alpha < 1.
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

/// sum P log(P/Q), with 0 log 0 = 0.
double kl(const Distribution& p, const Distribution& q);

/// 1/(alpha-1) log sum P^a Q^(1-a). alpha = 1 gives kl.
double renyi_d(const Distribution& p, const Distribution& q, Alpha alpha);

/// Density power divergence
///   1/(a-1) sum [P^a - a P Q^(a-1) + (a-1) Q^a].
/// alpha = 1 gives kl.
double density_power_b(const Distribution& p, const Distribution& q, Alpha alpha);

/// Relative alpha-entropy
///   a/(1-a) log sum P Q^(a-1) - 1/(1-a) log sum P^a + log sum Q^a.
/// alpha = 1 gives kl.
double rel_alpha_entropy_i(const Distribution& p, const Distribution& q, Alpha alpha);

double divergence(DivergenceKind kind, const Distribution& p, const Distribution& q,
                  Alpha alpha);

/// Shannon entropy with 0 log 0 = 0.
double entropy(const Distribution& p);

}  // namespace divproj
