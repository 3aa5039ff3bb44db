#pragma once

// Quasi-fermion spectrum of the periodic transverse-field Ising / XY chain
//
//   H_chain = -J sum_j [ (1+gamma)/2 sz_j sz_{j+1} + (1-gamma)/2 sy_j sy_{j+1}
//                        + lambda sx_j ]
//
// After Jordan-Wigner, Fourier and Bogoliubov transformations every pair of
// momenta +-q (q = 2 pi k / N, k = 1 .. (N-1)/2) is described by
//
//   eps_k = 2J (lambda - cos q)
//   xi_k  = 2J sqrt((cos q - lambda)^2 + gamma^2 sin^2 q)
//   cos(theta_k) = eps_k / xi_k,   sin(theta_k) = 2 J gamma sin q / xi_k
//
// and the ground-state transverse moment and its variance are taken as
//
//   m  = sum_{k>0} cos(theta_k),   s2 = sum_{k>0} sin^2(theta_k).
//
// Energies are in the same unit as J (J = 1 by default).

#include <vector>

namespace lzchain {

enum class ChainKind { Ising, XY };

/// How a mode with xi_k == 0 (XX chain, lambda == cos q) is treated.
enum class GaplessPolicy {
  /// One-sided limit lambda -> cos(q)+: cos(theta) = +1, sin(theta) = 0.
  Limit,
  /// Throw GaplessModeError.
  Strict,
};

/// Modes with xi below this multiple of J are considered gapless.
inline constexpr double kGaplessTolerance = 1e-14;

struct ChainSpec {
  ChainKind kind = ChainKind::Ising;
  int n = 3;
  double j = 1.0;
  double lambda = 0.0;
  double gamma = 1.0;

  static ChainSpec ising(int n, double lambda, double j = 1.0);
  static ChainSpec xy(int n, double lambda, double gamma, double j = 1.0);

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const ChainSpec&) const = default;
};

struct Mode {
  int k = 0;
  double momentum = 0.0;
  double eps = 0.0;
  double xi = 0.0;
  double cos_theta = 1.0;
  double sin_theta = 0.0;
};

struct Spectrum {
  ChainSpec spec;
  std::vector<Mode> modes;
};

struct GroundMoments {
  double m = 0.0;
  double s2 = 0.0;
};

struct Dispersion {
  double eps = 0.0;
  double xi = 0.0;
};

struct BogoliubovAngle {
  double cos_theta = 1.0;
  double sin_theta = 0.0;
};

/// Positive momentum indices 1 .. (n-1)/2. Rejects even n and n < 3.
std::vector<int> momenta(int n);

Dispersion dispersion(const ChainSpec& spec, int k);

BogoliubovAngle bogoliubov(const ChainSpec& spec, int k,
                           GaplessPolicy policy = GaplessPolicy::Limit);

Spectrum spectrum(const ChainSpec& spec,
                  GaplessPolicy policy = GaplessPolicy::Limit);

GroundMoments ground_moments(const Spectrum& spectrum);

/// Convenience: ground_moments(spectrum(spec, policy)).
GroundMoments ground_moments(const ChainSpec& spec,
                             GaplessPolicy policy = GaplessPolicy::Limit);

const char* to_string(ChainKind kind);

}  // namespace lzchain
