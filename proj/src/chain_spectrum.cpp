#include "lzchain/chain_spectrum.hpp"

#include <cmath>
#include <numbers>

#include "lzchain/errors.hpp"

namespace lzchain {

namespace {

void check_k(const ChainSpec& spec, int k) {
  if (k < 1 || k > (spec.n - 1) / 2) {
    throw ValidationError("k", "momentum index " + std::to_string(k) +
                                   " outside 1.." +
                                   std::to_string((spec.n - 1) / 2));
  }
}

double momentum_of(int n, int k) {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
}

}  // namespace

ChainSpec ChainSpec::ising(int n, double lambda, double j) {
  ChainSpec spec{ChainKind::Ising, n, j, lambda, 1.0};
  spec.validate();
  return spec;
}

ChainSpec ChainSpec::xy(int n, double lambda, double gamma, double j) {
  ChainSpec spec{ChainKind::XY, n, j, lambda, gamma};
  spec.validate();
  return spec;
}

void ChainSpec::validate() const {
  if (n < 3) throw ValidationError("n", "N must be >= 3");
  if (n % 2 == 0) throw ValidationError("n", "N must be odd");
  if (!(std::isfinite(j) && j > 0.0)) throw ValidationError("j", "J must be > 0");
  if (!(std::isfinite(lambda) && lambda >= 0.0)) {
    throw ValidationError("lambda", "lambda must be >= 0");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ValidationError("gamma", "gamma must lie in [0, 1]");
  }
  if (kind == ChainKind::Ising && gamma != 1.0) {
    throw ValidationError("gamma", "Ising chain requires gamma = 1");
  }
}

std::vector<int> momenta(int n) {
  if (n < 3) throw ValidationError("n", "N must be >= 3");
  if (n % 2 == 0) throw ValidationError("n", "N must be odd");
  std::vector<int> ks;
  ks.reserve(static_cast<std::size_t>((n - 1) / 2));
  for (int k = 1; k <= (n - 1) / 2; ++k) ks.push_back(k);
  return ks;
}

Dispersion dispersion(const ChainSpec& spec, int k) {
  check_k(spec, k);
  const double q = momentum_of(spec.n, k);
  const double c = std::cos(q);
  const double s = std::sin(q);
  return {2.0 * spec.j * (spec.lambda - c),
          2.0 * spec.j * std::hypot(c - spec.lambda, spec.gamma * s)};
}

BogoliubovAngle bogoliubov(const ChainSpec& spec, int k, GaplessPolicy policy) {
  const auto [eps, xi] = dispersion(spec, k);
  if (xi <= kGaplessTolerance * spec.j) {
    if (policy == GaplessPolicy::Strict) throw GaplessModeError(k, spec.lambda);
    return {1.0, 0.0};
  }
  const double q = momentum_of(spec.n, k);
  return {eps / xi, 2.0 * spec.j * spec.gamma * std::sin(q) / xi};
}

Spectrum spectrum(const ChainSpec& spec, GaplessPolicy policy) {
  spec.validate();
  Spectrum out{spec, {}};
  out.modes.reserve(static_cast<std::size_t>((spec.n - 1) / 2));
  for (int k : momenta(spec.n)) {
    const auto [eps, xi] = dispersion(spec, k);
    const auto [cos_t, sin_t] = bogoliubov(spec, k, policy);
    out.modes.push_back({k, momentum_of(spec.n, k), eps, xi, cos_t, sin_t});
  }
  return out;
}

GroundMoments ground_moments(const Spectrum& spectrum) {
  GroundMoments gm;
  for (const Mode& mode : spectrum.modes) {
    gm.m += mode.cos_theta;
    gm.s2 += mode.sin_theta * mode.sin_theta;
  }
  return gm;
}

GroundMoments ground_moments(const ChainSpec& spec, GaplessPolicy policy) {
  return ground_moments(spectrum(spec, policy));
}

const char* to_string(ChainKind kind) {
  return kind == ChainKind::Ising ? "ising" : "xy";
}

}  // namespace lzchain
