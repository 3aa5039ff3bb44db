#pragma once

// Brute-force reference for the chain-driven Landau-Zener problem.
//
// Basis convention: the two-level system is the most significant tensor
// factor, index = s * 2^N + c with s = 0 for |up> (sz = +1) and s = 1 for
// |down>. Bit j of the chain index c is spin j, 0 meaning sz_j = +1.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

#include "lzchain/chain_spectrum.hpp"
#include "lzchain/lz_core.hpp"

namespace lzchain::oracle {

/// Hard ceiling on the chain length (full dimension 2^(N+1) <= 16384).
inline constexpr int kMaxSpins = 13;

struct DenseOperator {
  Eigen::MatrixXcd matrix;

  Eigen::Index dim() const { return matrix.rows(); }
  /// max |A - A^dagger| divided by the largest entry magnitude.
  double hermiticity_defect() const;
};

struct StateVector {
  Eigen::VectorXcd amplitudes;

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

struct ChainGroundState {
  StateVector state;  ///< chain factor only, dimension 2^N
  double energy = 0.0;
  double gap = 0.0;  ///< E_1 - E_0 over the full chain spectrum
  /// Set when gap < 1e-10 J; `state` is then the even-parity member
  /// (eigenvalue +1 of prod_j sx_j) of the lowest multiplet.
  bool degenerate = false;
};

struct OracleConfig {
  double t_span = 40.0;          ///< integrate t in [-T, T], units hbar / J
  double step_tolerance = 1e-10; ///< local splitting-error target per step
  double max_phase_step = 0.05;  ///< cap on the sweep phase v |t| h per step
  double max_step = 1.0 / 64.0;
  double norm_budget = 1e-8;
  /// Propagate in the smallest subspace that contains the initial chain
  /// state and is invariant under H_chain and J^x. Exact; off only for
  /// cross-checks.
  bool reduce_sector = true;
  /// Also run the inverse evolution +T -> -T and report the fidelity.
  bool round_trip = false;
  int max_spins = kMaxSpins;

  void validate() const;
};

struct OracleResult {
  double p_flip = 0.0;
  double p_survive = 1.0;
  double norm_drift = 0.0;  ///< max | ||psi|| - 1 | over checkpoints
  double t_span_used = 0.0;
  bool converged = false;  ///< only set by check_convergence
  /// |<up, chain ground state | psi(T)>|^2 / p_survive.
  double survivor_ground_overlap = 0.0;
  std::optional<double> round_trip_fidelity;
  std::size_t steps = 0;
  Eigen::Index sector_dim = 0;
  /// v T < 20 max(delta, max_k xi_k): asymptotic regime not reached.
  bool short_window = false;
};

struct ConvergenceReport {
  bool converged = false;
  double t_short = 0.0;
  double t_long = 0.0;
  double p_short = 0.0;
  double p_long = 0.0;
  OracleResult primary;  ///< the run at t_span, with `converged` filled in
  OracleResult extended;
};

/// Drift threshold between the T and 1.5 T runs.
inline constexpr double kConvergenceThreshold = 5e-3;

/// Real symmetric chain Hamiltonian -J sum[(1+g)/2 zz + (1-g)/2 yy + lambda x].
Eigen::MatrixXd chain_hamiltonian(const ChainSpec& spec);

/// J^x = sum_j sx_j on n spins.
Eigen::MatrixXd total_sx(int n);

/// prod_j sx_j on n spins, returned as the bit-flip permutation.
Eigen::MatrixXd chain_parity(int n);

/// Full H(t) in the 2^(N+1) basis.
DenseOperator build_hamiltonian(const ChainSpec& spec, const LZParams& params, double t,
                                int max_spins = kMaxSpins);

ChainGroundState chain_ground_state(const ChainSpec& spec, int max_spins = kMaxSpins);

/// <0| W^2 |0> with W = delta/2 - g J^x, evaluated on the dense ground state.
double ground_state_gamma_squared(const ChainSpec& spec, const LZParams& params,
                                  int max_spins = kMaxSpins);

/// Integrates i hbar dpsi/dt = H(t) psi from |up> x |chain ground state>.
/// Throws NormBudgetExceeded when the drift leaves the configured budget.
OracleResult propagate(const ChainSpec& spec, const LZParams& params,
                       const OracleConfig& config);

/// Runs propagate at T and 1.5 T.
ConvergenceReport check_convergence(const ChainSpec& spec, const LZParams& params,
                                    const OracleConfig& config);

/// check_convergence, throwing NonConvergent instead of reporting.
OracleResult propagate_converged(const ChainSpec& spec, const LZParams& params,
                                 const OracleConfig& config);

}  // namespace lzchain::oracle
