#include "lzchain/lz_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lzchain/errors.hpp"

namespace lzchain {

void LZParams::validate() const {
  if (!(std::isfinite(delta) && delta >= 0.0)) {
    throw ValidationError("delta", "delta must be >= 0");
  }
  if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("v", "v must be > 0");
  if (!(std::isfinite(g) && g >= 0.0)) throw ValidationError("g", "g must be >= 0");
  if (!(std::isfinite(hbar) && hbar > 0.0)) {
    throw ValidationError("hbar", "hbar must be > 0");
  }
}

double gamma_squared(const GroundMoments& moments, const LZParams& params) {
  const double shifted = 0.5 * params.delta - params.g * moments.m;
  return shifted * shifted + params.g * params.g * moments.s2;
}

LZResult lz_probability(double gamma2, const LZParams& params) {
  params.validate();
  if (!(gamma2 >= 0.0)) {
    throw ValidationError("gamma2", "gamma2 must be >= 0, got " + std::to_string(gamma2));
  }
  const double exponent =
      std::max(-2.0 * std::numbers::pi * gamma2 / (params.hbar * params.v), kMinExponent);
  LZResult out;
  out.gamma2 = gamma2;
  out.p_survive = exponent <= kMinExponent ? 0.0 : std::exp(exponent);
  out.p_flip = exponent <= kMinExponent ? 1.0 : -std::expm1(exponent);
  return out;
}

double standard_lz(double delta, double v, double hbar) {
  if (!(v > 0.0)) throw ValidationError("v", "v must be > 0");
  return -std::expm1(-std::numbers::pi * delta * delta / (2.0 * hbar * v));
}

LZResult chain_driven_probability(const ChainSpec& spec, const LZParams& params,
                                  GaplessPolicy policy) {
  params.validate();
  return lz_probability(gamma_squared(ground_moments(spectrum(spec, policy)), params),
                        params);
}

}  // namespace lzchain
