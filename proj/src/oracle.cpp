#include "lzchain/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "lzchain/errors.hpp"

namespace lzchain::oracle {

namespace {

using Complex = std::complex<double>;

constexpr double kDegeneracyGap = 1e-10;
constexpr double kSectorRankTolerance = 1e-10;
constexpr double kSectorResidualTolerance = 1e-8;
constexpr std::size_t kNormCheckInterval = 1024;

void check_dimension(const ChainSpec& spec, int max_spins) {
  spec.validate();
  const int cap = std::min(max_spins, kMaxSpins);
  if (spec.n > cap) {
    throw DimensionCapError("chain of " + std::to_string(spec.n) +
                            " spins exceeds the dense cap of " + std::to_string(cap));
  }
}

Eigen::VectorXd apply_parity(const Eigen::VectorXd& v, int n) {
  const std::uint32_t mask = (std::uint32_t{1} << n) - 1;
  Eigen::VectorXd out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    out(static_cast<Eigen::Index>(static_cast<std::uint32_t>(c) ^ mask)) = v(c);
  }
  return out;
}

struct RealGroundState {
  Eigen::VectorXd vector;
  double energy = 0.0;
  double gap = 0.0;
  bool degenerate = false;
};

RealGroundState real_ground_state(const ChainSpec& spec, const Eigen::MatrixXd& h) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::VectorXd& energies = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  RealGroundState gs;
  gs.energy = energies(0);
  gs.gap = energies(1) - energies(0);
  gs.vector = vectors.col(0);
  if (gs.gap >= kDegeneracyGap * spec.j) return gs;

  gs.degenerate = true;
  Eigen::Index multiplicity = 1;
  while (multiplicity < energies.size() &&
         energies(multiplicity) - energies(0) < kDegeneracyGap * spec.j) {
    ++multiplicity;
  }
  const Eigen::MatrixXd lowest = vectors.leftCols(multiplicity);
  Eigen::MatrixXd parity_lowest(lowest.rows(), multiplicity);
  for (Eigen::Index i = 0; i < multiplicity; ++i) {
    parity_lowest.col(i) = apply_parity(lowest.col(i), spec.n);
  }
  const Eigen::MatrixXd restricted = lowest.transpose() * parity_lowest;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> parity_solver(
      0.5 * (restricted + restricted.transpose()));
  // Largest parity eigenvalue (+1) is the last column.
  gs.vector = (lowest * parity_solver.eigenvectors().col(multiplicity - 1)).normalized();
  return gs;
}

// Smallest subspace containing `seed` and closed under both operators. The
// rank of [B, H B, Jx B] is grown until it stops changing.
Eigen::MatrixXd invariant_sector(const Eigen::MatrixXd& h, const Eigen::MatrixXd& jx,
                                 const Eigen::VectorXd& seed) {
  const Eigen::Index dim = h.rows();
  Eigen::MatrixXd basis = seed.normalized();
  while (basis.cols() < dim) {
    Eigen::MatrixXd candidates(dim, 3 * basis.cols());
    candidates << basis, h * basis, jx * basis;
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(candidates, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > kSectorRankTolerance * sv(0)) ++rank;
    if (rank <= basis.cols()) break;
    basis = svd.matrixU().leftCols(std::min(rank, dim));
  }

  const auto residual = [&](const Eigen::MatrixXd& op) {
    const Eigen::MatrixXd image = op * basis;
    return (image - basis * (basis.transpose() * image)).norm() / std::max(op.norm(), 1.0);
  };
  if (residual(h) > kSectorResidualTolerance || residual(jx) > kSectorResidualTolerance) {
    return Eigen::MatrixXd::Identity(dim, dim);
  }
  return basis;
}

// Strang splitting of H(t) = A(t) + K with A(t) = (v t / 2) sz (exact phases)
// and K the static remainder (exact via its eigendecomposition). Step sizes
// are drawn from a dyadic ladder max_step * 2^-level so the static
// propagators can be cached.
class SplitPropagator {
 public:
  SplitPropagator(const Eigen::MatrixXd& k, const LZParams& params, const OracleConfig& config)
      : half_(k.rows() / 2), v_(params.v), hbar_(params.hbar), config_(config) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    const double radius =
        std::max(0.5 * (eigenvalues_.maxCoeff() - eigenvalues_.minCoeff()), 1e-300);
    // Leading Strang defect in the resonance window, where v|t| ~ ||K||,
    // is bounded by (h/hbar)^3 ||K||^3 / 3.
    tolerance_step_ = hbar_ * std::cbrt(3.0 * config.step_tolerance) / radius;
  }

  struct Schedule {
    std::vector<std::int8_t> levels;
    double final_step = 0.0;  ///< explicit last step, 0 if the ladder hit T
  };

  double forward(Eigen::VectorXcd& psi, double t_span, Schedule* schedule) {
    double t = -t_span;
    double drift = 0.0;
    std::size_t count = 0;
    while (t < t_span) {
      const double phase_step =
          config_.max_phase_step * hbar_ / (v_ * (std::abs(t) + config_.max_step));
      const double wanted = std::min({config_.max_step, phase_step, tolerance_step_});
      const int level = std::clamp(
          static_cast<int>(std::ceil(std::log2(config_.max_step / wanted))), 0, 60);
      double h = std::ldexp(config_.max_step, -level);
      if (t + h >= t_span) {
        h = t_span - t;
        apply_step(psi, t, t_span, explicit_propagator(h));
        if (schedule != nullptr) schedule->final_step = h;
        t = t_span;
      } else {
        apply_step(psi, t, t + h, ladder_propagator(level));
        if (schedule != nullptr) schedule->levels.push_back(static_cast<std::int8_t>(level));
        t += h;
      }
      if (++count % kNormCheckInterval == 0) {
        drift = std::max(drift, std::abs(psi.norm() - 1.0));
        check_budget(drift);
      }
    }
    steps_ = count;
    drift = std::max(drift, std::abs(psi.norm() - 1.0));
    check_budget(drift);
    return drift;
  }

  // Exact inverse of `forward` for the recorded schedule.
  void backward(Eigen::VectorXcd& psi, double t_span, const Schedule& schedule) {
    double b = t_span;
    if (schedule.final_step > 0.0) {
      const double a = t_span - schedule.final_step;
      apply_inverse_step(psi, a, b, explicit_propagator(schedule.final_step));
      b = a;
    }
    for (auto it = schedule.levels.rbegin(); it != schedule.levels.rend(); ++it) {
      const double a = b - std::ldexp(config_.max_step, -*it);
      apply_inverse_step(psi, a, b, ladder_propagator(*it));
      b = a;
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  Eigen::MatrixXcd explicit_propagator(double h) const {
    const Eigen::VectorXcd phases =
        (eigenvalues_.cast<Complex>() * Complex(0.0, -h / hbar_)).array().exp().matrix();
    Eigen::MatrixXcd u = eigenvectors_.cast<Complex>() * phases.asDiagonal() *
                         eigenvectors_.transpose().cast<Complex>();
    // Newton-Schulz steps toward the nearest unitary; the raw product is off
    // by a few ulps, which would otherwise accumulate over millions of steps.
    const Eigen::Index n = u.rows();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::MatrixXcd gram = u.adjoint() * u;
      u = u * (1.5 * Eigen::MatrixXcd::Identity(n, n) - 0.5 * gram);
    }
    return u;
  }

  const Eigen::MatrixXcd& ladder_propagator(int level) {
    if (static_cast<std::size_t>(level) >= ladder_.size()) {
      ladder_.resize(static_cast<std::size_t>(level) + 1);
    }
    auto& slot = ladder_[static_cast<std::size_t>(level)];
    if (slot.size() == 0) slot = explicit_propagator(std::ldexp(config_.max_step, -level));
    return slot;
  }

  // Multiplies the |up> block by exp(-i phi) and |down> by exp(+i phi),
  // phi = integral of v t / (2 hbar) over [a, b].
  void sweep_phase(Eigen::VectorXcd& psi, double a, double b, double sign) const {
    const double phi = sign * v_ * (b - a) * (b + a) / (4.0 * hbar_);
    const Complex up = std::polar(1.0, -phi);
    psi.head(half_) *= up;
    psi.tail(half_) *= std::conj(up);
  }

  void apply_step(Eigen::VectorXcd& psi, double a, double b, const Eigen::MatrixXcd& u) {
    const double mid = 0.5 * (a + b);
    sweep_phase(psi, a, mid, 1.0);
    scratch_.noalias() = u * psi;
    psi.swap(scratch_);
    sweep_phase(psi, mid, b, 1.0);
  }

  void apply_inverse_step(Eigen::VectorXcd& psi, double a, double b,
                          const Eigen::MatrixXcd& u) {
    const double mid = 0.5 * (a + b);
    sweep_phase(psi, mid, b, -1.0);
    scratch_.noalias() = u.adjoint() * psi;
    psi.swap(scratch_);
    sweep_phase(psi, a, mid, -1.0);
  }

  void check_budget(double drift) const {
    if (drift > config_.norm_budget) throw NormBudgetExceeded(drift, config_.norm_budget);
  }

  Eigen::Index half_;
  double v_;
  double hbar_;
  OracleConfig config_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double tolerance_step_ = 0.0;
  std::vector<Eigen::MatrixXcd> ladder_;
  Eigen::VectorXcd scratch_;
  std::size_t steps_ = 0;
};

}  // namespace

double DenseOperator::hermiticity_defect() const {
  const double scale = matrix.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void OracleConfig::validate() const {
  if (!(t_span > 0.0)) throw ValidationError("t_span", "t_span must be > 0");
  if (!(step_tolerance > 0.0)) {
    throw ValidationError("step_tolerance", "step_tolerance must be > 0");
  }
  if (!(max_phase_step > 0.0)) {
    throw ValidationError("max_phase_step", "max_phase_step must be > 0");
  }
  if (!(max_step > 0.0)) throw ValidationError("max_step", "max_step must be > 0");
  if (!(norm_budget > 0.0)) throw ValidationError("norm_budget", "norm_budget must be > 0");
  if (max_spins < 3 || max_spins > kMaxSpins) {
    throw ValidationError("max_spins", "max_spins must lie in [3, " +
                                           std::to_string(kMaxSpins) + "]");
  }
}

Eigen::MatrixXd chain_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const double zz = -spec.j * 0.5 * (1.0 + spec.gamma);
  const double yy = -spec.j * 0.5 * (1.0 - spec.gamma);
  const double field = -spec.j * spec.lambda;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto bits = static_cast<std::uint32_t>(c);
    for (int site = 0; site < n; ++site) {
      const int next = (site + 1) % n;
      const double z_site = ((bits >> site) & 1U) != 0U ? -1.0 : 1.0;
      const double z_next = ((bits >> next) & 1U) != 0U ? -1.0 : 1.0;
      h(c, c) += zz * z_site * z_next;
      if (yy != 0.0) {
        // sy_a sy_b |z_a z_b> = -z_a z_b |-z_a -z_b>
        const auto flipped = bits ^ (1U << site) ^ (1U << next);
        h(static_cast<Eigen::Index>(flipped), c) += yy * (-z_site * z_next);
      }
      h(static_cast<Eigen::Index>(bits ^ (1U << site)), c) += field;
    }
  }
  return h;
}

Eigen::MatrixXd total_sx(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (int site = 0; site < n; ++site) {
      jx(static_cast<Eigen::Index>(static_cast<std::uint32_t>(c) ^ (1U << site)), c) += 1.0;
    }
  }
  return jx;
}

Eigen::MatrixXd chain_parity(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const std::uint32_t mask = (std::uint32_t{1} << n) - 1;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    p(static_cast<Eigen::Index>(static_cast<std::uint32_t>(c) ^ mask), c) = 1.0;
  }
  return p;
}

DenseOperator build_hamiltonian(const ChainSpec& spec, const LZParams& params, double t,
                                int max_spins) {
  check_dimension(spec, max_spins);
  params.validate();
  const Eigen::MatrixXd hc = chain_hamiltonian(spec);
  const Eigen::MatrixXd jx = total_sx(spec.n);
  const Eigen::Index dim = hc.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd coupling = 0.5 * params.delta * id - params.g * jx;
  const double sweep = 0.5 * params.v * t;

  DenseOperator op{Eigen::MatrixXcd::Zero(2 * dim, 2 * dim)};
  op.matrix.topLeftCorner(dim, dim) = (hc + sweep * id).cast<Complex>();
  op.matrix.bottomRightCorner(dim, dim) = (hc - sweep * id).cast<Complex>();
  op.matrix.topRightCorner(dim, dim) = coupling.cast<Complex>();
  op.matrix.bottomLeftCorner(dim, dim) = coupling.cast<Complex>();
  return op;
}

ChainGroundState chain_ground_state(const ChainSpec& spec, int max_spins) {
  check_dimension(spec, max_spins);
  const RealGroundState gs = real_ground_state(spec, chain_hamiltonian(spec));
  return {StateVector{gs.vector.cast<Complex>()}, gs.energy, gs.gap, gs.degenerate};
}

double ground_state_gamma_squared(const ChainSpec& spec, const LZParams& params,
                                  int max_spins) {
  check_dimension(spec, max_spins);
  params.validate();
  const RealGroundState gs = real_ground_state(spec, chain_hamiltonian(spec));
  const Eigen::VectorXd w_gs = 0.5 * params.delta * gs.vector - params.g * (total_sx(spec.n) * gs.vector);
  return w_gs.squaredNorm();
}

OracleResult propagate(const ChainSpec& spec, const LZParams& params,
                       const OracleConfig& config) {
  config.validate();
  check_dimension(spec, config.max_spins);
  params.validate();

  const Eigen::MatrixXd hc = chain_hamiltonian(spec);
  const Eigen::MatrixXd jx = total_sx(spec.n);
  const RealGroundState gs = real_ground_state(spec, hc);

  const Eigen::MatrixXd basis =
      config.reduce_sector ? invariant_sector(hc, jx, gs.vector)
                           : Eigen::MatrixXd::Identity(hc.rows(), hc.cols());
  const Eigen::Index d = basis.cols();
  const Eigen::MatrixXd hr = basis.transpose() * hc * basis;
  const Eigen::MatrixXd wr = 0.5 * params.delta * Eigen::MatrixXd::Identity(d, d) -
                             params.g * (basis.transpose() * jx * basis);
  Eigen::MatrixXd k(2 * d, 2 * d);
  k << hr, wr, wr, hr;
  k = 0.5 * (k + k.transpose()).eval();

  const Eigen::VectorXd gs_reduced = basis.transpose() * gs.vector;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2 * d);
  psi.head(d) = gs_reduced.cast<Complex>();
  const Eigen::VectorXcd initial = psi;

  SplitPropagator propagator(k, params, config);
  SplitPropagator::Schedule schedule;
  OracleResult result;
  result.norm_drift =
      propagator.forward(psi, config.t_span, config.round_trip ? &schedule : nullptr);
  result.steps = propagator.steps();
  result.sector_dim = d;
  result.t_span_used = config.t_span;

  result.p_survive = psi.head(d).squaredNorm();
  result.p_flip = psi.tail(d).squaredNorm();
  if (result.p_survive > 0.0) {
    result.survivor_ground_overlap =
        std::norm(gs_reduced.cast<Complex>().dot(psi.head(d))) / result.p_survive;
  }

  double max_xi = 0.0;
  for (const Mode& mode : spectrum(spec).modes) max_xi = std::max(max_xi, mode.xi);
  result.short_window = params.v * config.t_span < 20.0 * std::max(params.delta, max_xi);

  if (config.round_trip) {
    propagator.backward(psi, config.t_span, schedule);
    result.round_trip_fidelity = std::norm(initial.dot(psi));
  }
  return result;
}

ConvergenceReport check_convergence(const ChainSpec& spec, const LZParams& params,
                                    const OracleConfig& config) {
  ConvergenceReport report;
  report.t_short = config.t_span;
  report.t_long = 1.5 * config.t_span;
  report.primary = propagate(spec, params, config);
  OracleConfig extended = config;
  extended.t_span = report.t_long;
  report.extended = propagate(spec, params, extended);
  report.p_short = report.primary.p_flip;
  report.p_long = report.extended.p_flip;
  report.converged = std::abs(report.p_long - report.p_short) < kConvergenceThreshold;
  report.primary.converged = report.converged;
  report.extended.converged = report.converged;
  return report;
}

OracleResult propagate_converged(const ChainSpec& spec, const LZParams& params,
                                 const OracleConfig& config) {
  const ConvergenceReport report = check_convergence(spec, params, config);
  if (!report.converged) {
    throw NonConvergent("p_flip moved from " + std::to_string(report.p_short) + " at T=" +
                        std::to_string(report.t_short) + " to " +
                        std::to_string(report.p_long) + " at T=" +
                        std::to_string(report.t_long));
  }
  return report.primary;
}

}  // namespace lzchain::oracle
