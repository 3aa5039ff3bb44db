#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "lzchain/errors.hpp"
#include "lzchain/oracle.hpp"
#include "reference.hpp"

using namespace lzchain;
using namespace lzchain::oracle;

namespace {

Eigen::MatrixXcd sx_on_system(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.topRightCorner(d, d).setIdentity();
  out.bottomLeftCorner(d, d).setIdentity();
  return out;
}

Eigen::MatrixXcd identity_on_system(const Eigen::MatrixXd& chain) {
  const Eigen::Index d = chain.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d) = chain.cast<std::complex<double>>();
  out.bottomRightCorner(d, d) = chain.cast<std::complex<double>>();
  return out;
}

}  // namespace

TEST_CASE("tunnelling term alone is sx on the system") {
  const auto spec = ChainSpec::ising(3, 0.7);
  const auto h = build_hamiltonian(spec, {2.0, 50.0, 0.0, 1.0}, 0.0);
  REQUIRE(h.dim() == 16);
  const Eigen::MatrixXcd rest = h.matrix - identity_on_system(chain_hamiltonian(spec));
  CHECK((rest - sx_on_system(3)).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rest);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(eig.eigenvalues()(i) == doctest::Approx(-1.0));
  for (Eigen::Index i = 8; i < 16; ++i) CHECK(eig.eigenvalues()(i) == doctest::Approx(1.0));
}

TEST_CASE("zero-field chain spectrum on three spins") {
  const Eigen::MatrixXd hc = chain_hamiltonian(ChainSpec::ising(3, 0.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hc);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(-3.0));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(-3.0));
  for (Eigen::Index i = 2; i < 8; ++i) CHECK(eig.eigenvalues()(i) == doctest::Approx(1.0));

  const auto h = build_hamiltonian(ChainSpec::ising(3, 0.0), {0.0, 50.0, 0.0, 1.0}, 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(h.matrix);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(full.eigenvalues()(i) == doctest::Approx(-3.0));
  CHECK(full.eigenvalues()(4) == doctest::Approx(1.0));
}

TEST_CASE("Hamiltonian is Hermitian for random draws") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    const auto spec = ChainSpec::xy(5, 3.0 * u(rng), u(rng), 0.2 + 2.0 * u(rng));
    const LZParams p{20.0 * u(rng), 1.0 + 199.0 * u(rng), u(rng), 1.0};
    const auto h = build_hamiltonian(spec, p, -40.0 + 80.0 * u(rng));
    CHECK(h.hermiticity_defect() < 1e-12);
    CHECK(h.matrix.imag().cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(build_hamiltonian(ChainSpec::ising(15, 1.0), {}, 0.0), DimensionCapError);
  CHECK_THROWS_AS(chain_ground_state(ChainSpec::ising(7, 1.0), 5), DimensionCapError);
}

TEST_CASE("ground state at strong and zero field") {
  const auto strong = chain_ground_state(ChainSpec::ising(3, 10.0));
  CHECK_FALSE(strong.degenerate);
  const Eigen::VectorXcd plus = Eigen::VectorXcd::Constant(8, 1.0 / std::sqrt(8.0));
  CHECK(std::norm(plus.dot(strong.state.amplitudes)) > 0.99);

  const auto zero = chain_ground_state(ChainSpec::ising(3, 0.0));
  CHECK(zero.degenerate);
  CHECK(zero.energy == doctest::Approx(-3.0));
  const auto& a = zero.state.amplitudes;
  CHECK(std::abs(a(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(a(0) - a(7)) < 1e-12);
  CHECK(zero.state.norm() == doctest::Approx(1.0));
}

TEST_CASE("dense ground state matches free fermions on the half-odd grid") {
  // Below the critical field with gamma < 1 the lowest state can sit in the
  // odd-parity sector, so those points are left out.
  for (int n : {3, 5, 7, 9}) {
    for (double gamma : {1.0, 0.5}) {
      for (double lambda : {0.5, 1.5, 2.0, 3.0}) {
        if (gamma < 1.0 && lambda < 1.0) continue;
        CAPTURE(n);
        CAPTURE(gamma);
        CAPTURE(lambda);
        const auto spec = ChainSpec::xy(n, lambda, gamma);
        const auto gs = chain_ground_state(spec);
        const auto ref = reference::half_odd_grid(n, lambda, gamma);
        CHECK(gs.energy == doctest::Approx(static_cast<double>(ref.energy)).epsilon(1e-10));

        const Eigen::MatrixXd jx = total_sx(n);
        const Eigen::VectorXcd& psi = gs.state.amplitudes;
        const Eigen::VectorXcd jpsi = jx.cast<std::complex<double>>() * psi;
        const double mean = psi.dot(jpsi).real();
        const double variance = jpsi.squaredNorm() - mean * mean;
        CHECK(mean == doctest::Approx(static_cast<double>(ref.mean)).epsilon(1e-10));
        CHECK(variance == doctest::Approx(static_cast<double>(ref.variance)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("closed-form moments differ from the dense ground state at finite N") {
  // Characterisation of the finite-chain gap between the two evaluations;
  // values from the independent reference sums.
  const auto spec = ChainSpec::ising(5, 2.0);
  const auto gm = ground_moments(spec);
  const auto dense = reference::half_odd_grid(5, 2.0L, 1.0L);
  CHECK(gm.m == doctest::Approx(1.8504).epsilon(1e-4));
  CHECK(static_cast<double>(dense.mean) == doctest::Approx(4.6427).epsilon(1e-4));
  CHECK(gm.s2 == doctest::Approx(0.2823).epsilon(1e-3));
  CHECK(static_cast<double>(dense.variance) == doctest::Approx(1.3636).epsilon(1e-3));
}

TEST_CASE("ground-state gamma squared from the dense state") {
  const auto spec = ChainSpec::ising(5, 2.0);
  const LZParams p{5.0, 50.0, 0.05, 1.0};
  const auto ref = reference::half_odd_grid(5, 2.0L, 1.0L);
  const long double shifted = 2.5L - 0.05L * ref.mean;
  const long double expected = shifted * shifted + 0.05L * 0.05L * ref.variance;
  CHECK(ground_state_gamma_squared(spec, p) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-10));
}

TEST_CASE("no tunnelling and no coupling: no flip") {
  OracleConfig config;
  const auto r = propagate(ChainSpec::ising(3, 1.5), {0.0, 50.0, 0.0, 1.0}, config);
  CHECK(r.p_flip < 1e-10);
  CHECK(r.norm_drift < 1e-8);
  const auto report = check_convergence(ChainSpec::ising(3, 1.5), {0.0, 50.0, 0.0, 1.0}, config);
  CHECK(report.converged);
  CHECK(report.p_short < 1e-10);
  CHECK(report.p_long < 1e-10);
}

TEST_CASE("uncoupled system reproduces the two-level result") {
  OracleConfig config;
  const LZParams p{5.0, 50.0, 0.0, 1.0};
  const auto r = propagate(ChainSpec::ising(3, 2.0), p, config);
  CHECK(std::abs(r.p_flip - standard_lz(5.0, 50.0)) < 0.01);
  CHECK(std::abs(r.p_flip + r.p_survive - 1.0) < config.norm_budget);

  const auto other = propagate(ChainSpec::ising(5, 0.5), p, config);
  CHECK(std::abs(other.p_flip - r.p_flip) < 1e-6);
  const auto xy = propagate(ChainSpec::xy(5, 1.2, 0.3), p, config);
  CHECK(std::abs(xy.p_flip - r.p_flip) < 1e-6);
}

TEST_CASE("convergence windows") {
  const LZParams p{5.0, 50.0, 0.0, 1.0};
  OracleConfig config;
  const auto long_run = check_convergence(ChainSpec::ising(3, 2.0), p, config);
  CHECK(long_run.converged);
  CHECK(long_run.t_short == 40.0);
  CHECK(long_run.t_long == 60.0);
  CHECK(long_run.primary.converged);

  config.t_span = 10.0;
  const auto short_run = check_convergence(ChainSpec::ising(3, 2.0), p, config);
  CHECK(short_run.t_long == 15.0);
  CHECK(std::abs(short_run.p_short - short_run.p_long) > 0.0);
  MESSAGE("T=10 vs 15 drift " << std::abs(short_run.p_short - short_run.p_long));

  config.t_span = 2.0;
  CHECK(propagate(ChainSpec::ising(3, 2.0), p, config).short_window);
  CHECK_FALSE(propagate(ChainSpec::ising(3, 2.0), p, OracleConfig{}).short_window);

  config.t_span = 0.5;
  CHECK_THROWS_AS(propagate_converged(ChainSpec::ising(3, 2.0), p, config), NonConvergent);
}

TEST_CASE("invariant sector has dimension 2^((N-1)/2)") {
  OracleConfig config;
  config.t_span = 5.0;
  for (int n : {3, 5, 7}) {
    const auto r = propagate(ChainSpec::ising(n, 2.0), {5.0, 50.0, 0.05, 1.0}, config);
    CHECK(r.sector_dim == (Eigen::Index{1} << ((n - 1) / 2)));
  }
}

TEST_CASE("sector reduction agrees with the full space") {
  const auto spec = ChainSpec::xy(5, 1.5, 0.6);
  const LZParams p{2.0, 50.0, 0.05, 1.0};
  OracleConfig config;
  config.t_span = 20.0;
  const auto reduced = propagate(spec, p, config);
  config.reduce_sector = false;
  const auto full = propagate(spec, p, config);
  CHECK(full.sector_dim == 32);
  CHECK(std::abs(reduced.p_flip - full.p_flip) < 1e-9);
  CHECK(std::abs(reduced.survivor_ground_overlap - full.survivor_ground_overlap) < 1e-8);
}

TEST_CASE("round trip returns the initial state") {
  OracleConfig config;
  config.round_trip = true;
  const auto r = propagate(ChainSpec::ising(5, 2.0), {5.0, 50.0, 0.05, 1.0}, config);
  REQUIRE(r.round_trip_fidelity.has_value());
  CHECK(*r.round_trip_fidelity > 1.0 - 1e-6);
  CHECK(r.norm_drift < 1e-8);
}

TEST_CASE("oracle follows the dense-state gamma squared") {
  const auto spec = ChainSpec::ising(5, 2.0);
  const LZParams p{5.0, 50.0, 0.05, 1.0};
  const auto report = check_convergence(spec, p, OracleConfig{});
  CHECK(report.converged);
  const double expected = lz_probability(ground_state_gamma_squared(spec, p), p).p_flip;
  CHECK(std::abs(report.p_long - expected) < 0.005);
  CHECK(std::abs(report.p_short - expected) < 0.005);
}

TEST_CASE("oracle config validation") {
  OracleConfig config;
  config.t_span = 0.0;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config = OracleConfig{};
  config.max_spins = 14;
  CHECK_THROWS_AS(config.validate(), ValidationError);
}
