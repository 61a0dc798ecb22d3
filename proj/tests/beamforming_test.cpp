#include "doctest.h"

#include <cmath>
#include <random>

#include "wpcn/beamforming.hpp"
#include "wpcn/channel.hpp"
#include "wpcn/eh.hpp"
#include "wpcn/errors.hpp"
#include "wpcn/noma.hpp"

using namespace wpcn;

namespace {

ChannelSet sampled(int devices, int n, std::uint64_t seed) {
  const Topology topo = make_topology(devices, n, {-5.0, 0.0, 0.0}, {0.0, 0.0, 1.0},
                                      {45.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 1.0, seed);
  FadingParams fading;
  fading.seed = seed + 1;
  return sample_channels(topo, fading);
}

// Channel set with a single device and prescribed N = 2 cascaded vectors.
ChannelSet synthetic_n2(const Eigen::VectorXcd& h_casc, std::complex<double> hd,
                        const Eigen::VectorXcd& q_casc, std::complex<double> qd) {
  ChannelSet cs;
  cs.g_e = Eigen::VectorXcd::Ones(2);
  cs.g_i = Eigen::VectorXcd::Ones(2);
  // pick h_r so that conj(h_r) .* g_e reproduces the wanted cascade
  cs.h_r = {h_casc.conjugate()};
  cs.q_r = {q_casc};
  cs.g_i = Eigen::VectorXcd::Ones(2);
  cs.h_d = Eigen::VectorXcd::Constant(1, hd);
  cs.q_d = Eigen::VectorXcd::Constant(1, qd);
  cs.pl_h_r = {1.0};
  cs.pl_q_r = {1.0};
  cs.pl_h_d = {1.0};
  cs.pl_q_d = {1.0};
  cascade(cs);
  return cs;
}

double grid_best_margin(const std::vector<TraceConstraint>& cons, int steps) {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < steps; ++b) {
      Eigen::VectorXcd v(2);
      v[0] = std::polar(1.0, 2.0 * M_PI * a / steps);
      v[1] = std::polar(1.0, 2.0 * M_PI * b / steps);
      best = std::max(best, -constraint_violation(cons, lift(v).V));
    }
  return best;
}

}  // namespace

TEST_CASE("dl bounds: zero power means zero required gain") {
  ResourceAllocation alloc;
  alloc.tau0 = 0.3;
  alloc.tau1 = 0.5;
  alloc.p = Eigen::VectorXd::Zero(2);
  alloc.f = Eigen::VectorXd::Zero(2);
  const std::vector<double> bounds = dl_constraint_bounds(alloc, {EhParams{}, EhParams{}}, 10.0);
  CHECK(bounds[0] == 0.0);
  CHECK(bounds[1] == 0.0);
}

TEST_CASE("dl bound reproduces the inverse-EH example") {
  // demand per unit charging time equal to the known forward example value
  const EhParams eh;
  const double phi = harvested_power(eh.b, eh);  // ~0.010531 W at 0.014 W in
  ResourceAllocation alloc;
  alloc.tau0 = 0.5;
  alloc.tau1 = 0.5;
  alloc.p = Eigen::VectorXd::Constant(1, phi * alloc.tau0 / alloc.tau1);
  alloc.f = alloc.p * alloc.tau1;
  const std::vector<double> bounds = dl_constraint_bounds(alloc, {eh}, 10.0);
  CHECK(bounds[0] == doctest::Approx(eh.b / 10.0).epsilon(1e-9));
}

TEST_CASE("dl trace constraint equivalent to energy causality") {
  const ChannelSet cs = sampled(2, 4, 51);
  const EhParams eh;
  const double pe = 10.0;
  ResourceAllocation alloc;
  alloc.tau0 = 0.4;
  alloc.tau1 = 0.4;
  alloc.p = Eigen::VectorXd::Constant(2, 2e-3);
  alloc.f = alloc.p * alloc.tau1;
  const std::vector<TraceConstraint> cons = dl_constraints(alloc, cs, {eh, eh}, pe);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v[i] = std::polar(1.0, u(rng));
    const Eigen::MatrixXcd V = lift(v).V;
    for (int k = 0; k < 2; ++k) {
      const double lhs = (cons[k].A * V).trace().real();
      const bool trace_ok = lhs >= cons[k].beta;
      const double harvested = harvested_power(pe * lhs, eh);
      const bool energy_ok = alloc.p[k] * alloc.tau1 <= alloc.tau0 * harvested * (1.0 + 1e-9);
      CHECK(trace_ok == energy_ok);
    }
  }
}

TEST_CASE("ul matrices: single device form") {
  const ChannelSet cs = sampled(1, 3, 53);
  ResourceAllocation alloc;
  alloc.tau1 = 0.5;
  alloc.p = Eigen::VectorXd::Constant(1, 3e-3);
  alloc.f = alloc.p * alloc.tau1;
  const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(1, 0.2);
  const double sigma2 = 1e-12;
  const auto cons = ul_constraint_matrices(alloc, cs, gamma, sigma2);
  const double c = std::exp2(gamma[0] / alloc.tau1) - 1.0;
  CHECK((cons[0].A - alloc.p[0] * cs.Q[0]).norm() <= 1e-14 * cons[0].A.norm());
  CHECK(cons[0].beta == doctest::Approx(c * sigma2).epsilon(1e-12));

  // zero QoS: vacuous constraint
  const auto zero = ul_constraint_matrices(alloc, cs, Eigen::VectorXd::Zero(1), sigma2);
  CHECK(zero[0].beta == 0.0);
  CHECK((zero[0].A * Eigen::MatrixXcd::Identity(4, 4)).trace().real() >= 0.0);
}

TEST_CASE("ul trace feasibility equivalent to QoS rates") {
  ChannelSet cs = sampled(3, 4, 57);
  cs = reorder_devices(cs, sic_order(cs));
  ResourceAllocation alloc;
  alloc.tau1 = 0.5;
  alloc.p = Eigen::VectorXd(3);
  alloc.p << 4e-3, 2e-3, 3e-3;
  alloc.f = alloc.p * alloc.tau1;
  const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(3, 0.1);
  const double sigma2 = 1e-12;
  const auto cons = ul_constraint_matrices(alloc, cs, gamma, sigma2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v[i] = std::polar(1.0, u(rng));
    const Eigen::MatrixXcd V = lift(v).V;
    for (int k = 0; k < 3; ++k) {
      const bool trace_ok = (cons[k].A * V).trace().real() >= cons[k].beta;
      const double rate = rate_k(k, alloc, cs, v, sigma2);
      CHECK(trace_ok == (rate >= gamma[k] * (1.0 - 1e-12)));
    }
  }
}

TEST_CASE("penalty with no constraints returns a capped rank-one solution") {
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Ones(3);
  const PenaltyResult res = penalty_solve({}, lift(v0));
  CHECK(res.status == SolveStatus::optimal);
  CHECK(res.phase.rank_gap <= 1e-6 * res.phase.V.trace().real());
  CHECK(std::isfinite(res.delta));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(res.phase.v[i]) == doctest::Approx(1.0));
}

TEST_CASE("penalty matches the exhaustive phase grid, single dl constraint") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  for (int rep = 0; rep < 3; ++rep) {
    Eigen::VectorXcd h(2);
    h << std::polar(1.0, u(rng)), std::polar(0.8, u(rng));
    const std::complex<double> hd = std::polar(0.5, u(rng));
    const ChannelSet cs = synthetic_n2(h, hd, h, hd);
    TraceConstraint tc;
    tc.A = cs.H[0];
    const double grid_best = grid_best_margin({{tc.A, 0.0}}, 360) + 0.0;
    // ask for most of the grid optimum; the penalty must reach it too
    tc.beta = 0.95 * grid_best * tc.A.norm();  // margin is normalized by |A|
    const PenaltyResult res = penalty_solve({tc}, lift(Eigen::VectorXcd::Ones(2)));
    REQUIRE(res.status == SolveStatus::optimal);
    const double achieved = (tc.A * lift(res.phase.v).V).trace().real();
    const double grid_abs = grid_best * tc.A.norm();
    CHECK(achieved >= grid_abs * (0.95 - 0.01));
    CHECK(achieved <= grid_abs * 1.01);  // grid resolution bound
  }
}

TEST_CASE("warm start from a feasible point never regresses") {
  const ChannelSet cs = sampled(1, 4, 63);
  TraceConstraint tc;
  tc.A = cs.H[0];
  // make the all-ones phase exactly tight
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
  tc.beta = (tc.A * lift(ones).V).trace().real();
  const PenaltyResult res = penalty_solve({tc}, lift(ones));
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.delta >= -1e-9);
}

TEST_CASE("extract_unit_modulus round trips") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  Eigen::VectorXcd v(5);
  for (int i = 0; i < 5; ++i) v[i] = std::polar(1.0, u(rng));
  const Eigen::VectorXcd back = extract_unit_modulus(lift(v).V);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(back[i] - v[i]) <= 1e-8);
}

TEST_CASE("extraction from degenerate and perturbed inputs") {
  const Eigen::VectorXcd from_id = extract_unit_modulus(Eigen::MatrixXcd::Identity(4, 4));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(from_id[i]) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(4);
  for (int i = 0; i < 4; ++i) v[i] = std::polar(1.0, u(rng));
  Eigen::MatrixXcd V = lift(v).V;
  Eigen::MatrixXcd noise(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) noise(i, j) = std::complex<double>(g(rng), g(rng));
  V += 1e-6 * 0.5 * (noise + noise.adjoint());
  const Eigen::VectorXcd vx = extract_unit_modulus(V);
  const ChannelSet cs = sampled(1, 4, 73);
  const double traced = (cs.H[0] * V).trace().real();
  const double at_vx = (cs.H[0] * lift(vx).V).trace().real();
  CHECK(at_vx == doctest::Approx(traced).epsilon(1e-4));
}

TEST_CASE("static equals dynamic when dl and ul coincide") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  Eigen::VectorXcd h(2);
  h << std::polar(1.0, u(rng)), std::polar(0.9, u(rng));
  const ChannelSet cs = synthetic_n2(h, {0.5, 0.0}, h, {0.5, 0.0});
  TraceConstraint tc;
  tc.A = cs.H[0];
  tc.beta = 0.9 * grid_best_margin({{tc.A, 0.0}}, 360) * tc.A.norm();
  const PenaltyResult dyn = penalty_solve({tc}, lift(Eigen::VectorXcd::Ones(2)));
  const PenaltyResult sta = static_solve({tc}, {tc}, lift(Eigen::VectorXcd::Ones(2)));
  REQUIRE(dyn.status == SolveStatus::optimal);
  REQUIRE(sta.status == SolveStatus::optimal);
  CHECK(sta.delta == doctest::Approx(dyn.delta).epsilon(1e-3));
}

TEST_CASE("static infeasible where dynamic is feasible") {
  // near-orthogonal dl/ul cascades: no shared phase vector serves both
  Eigen::VectorXcd h(2), q(2);
  h << std::complex<double>(1.0, 0.0), std::complex<double>(1.0, 0.0);
  q << std::complex<double>(1.0, 0.0), std::complex<double>(-1.0, 0.0);
  const ChannelSet cs = synthetic_n2(h, {1.0, 0.0}, q, {1.0, 0.0});
  TraceConstraint dl, ul;
  dl.A = cs.H[0];
  ul.A = cs.Q[0];
  const double dl_max = grid_best_margin({{dl.A, 0.0}}, 360) * dl.A.norm();
  const double ul_max = grid_best_margin({{ul.A, 0.0}}, 360) * ul.A.norm();
  const double joint_max =
      [&] {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < 360; ++a)
          for (int b = 0; b < 360; ++b) {
            Eigen::VectorXcd v(2);
            v[0] = std::polar(1.0, 2.0 * M_PI * a / 360.0);
            v[1] = std::polar(1.0, 2.0 * M_PI * b / 360.0);
            const Eigen::MatrixXcd V = lift(v).V;
            best = std::max(best, std::min((dl.A * V).trace().real() / dl_max,
                                           (ul.A * V).trace().real() / ul_max));
          }
        return best;
      }();
  REQUIRE(joint_max < 0.9);  // the instance really separates the two modes
  dl.beta = 0.95 * dl_max;
  ul.beta = 0.95 * ul_max;
  const PenaltyResult dyn_dl = penalty_solve({dl}, lift(Eigen::VectorXcd::Ones(2)));
  const PenaltyResult dyn_ul = penalty_solve({ul}, lift(Eigen::VectorXcd::Ones(2)));
  CHECK(dyn_dl.status == SolveStatus::optimal);
  CHECK(dyn_ul.status == SolveStatus::optimal);
  const PenaltyResult sta = static_solve({dl}, {ul}, lift(Eigen::VectorXcd::Ones(2)));
  CHECK(sta.status != SolveStatus::optimal);
}

TEST_CASE("spectral-norm linearization is a global lower bound") {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    auto rand_psd = [&] {
      Eigen::MatrixXcd M(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M(i, j) = std::complex<double>(g(rng), g(rng));
      return Eigen::MatrixXcd(M * M.adjoint());
    };
    const Eigen::MatrixXcd Vhat = rand_psd(), V = rand_psd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Vhat);
    const Eigen::VectorXcd u = eig.eigenvectors().col(3);
    const double lin = eig.eigenvalues()[3] + std::real((u.adjoint() * (V - Vhat) * u)(0, 0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig2(V);
    CHECK(eig2.eigenvalues()[3] >= lin - 1e-10);
  }
}
