#pragma once

#include "lzchain/chain_spectrum.hpp"

namespace lzchain {

/// Sweep parameters of H(t) = (v t / 2) sz + (delta / 2) sx - g sx J^x + H_chain.
struct LZParams {
  double delta = 0.0;  ///< tunnelling element, energy
  double v = 50.0;     ///< sweep velocity, energy^2 / hbar
  double g = 0.0;      ///< system-chain coupling, energy
  double hbar = 1.0;

  void validate() const;
};

struct LZResult {
  double gamma2 = 0.0;
  double p_flip = 0.0;
  double p_survive = 1.0;
};

/// Exponents below this value underflow to zero in double precision.
inline constexpr double kMinExponent = -745.0;

/// Effective coupling (delta/2 - g m)^2 + g^2 s2.
double gamma_squared(const GroundMoments& moments, const LZParams& params);

/// Survival exp(-2 pi gamma2 / (hbar v)) and its complement. Throws
/// ValidationError for negative gamma2.
LZResult lz_probability(double gamma2, const LZParams& params);

/// Bare two-level result 1 - exp(-pi delta^2 / (2 hbar v)).
double standard_lz(double delta, double v, double hbar = 1.0);

LZResult chain_driven_probability(const ChainSpec& spec, const LZParams& params,
                                  GaplessPolicy policy = GaplessPolicy::Limit);

}  // namespace lzchain
