#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracle/closed_forms.hpp"
#include "triwave/threshold.hpp"

using namespace triwave;

namespace {

const GridSpec kGrid = make_grid(1, 20, 512);
const SystemParams kParams = SystemParams::constant(kGrid, 3.0, 0.0, {1, 1, 1});

const ScalarReferences& scalars() {
  static const ScalarReferences s = scalar_references(kParams);
  return s;
}

/// Stand-in solver: vector with energy 1 - |gamma|/10 above `threshold`,
/// scalar with energy 4/3 below it; `flip` makes one point scalar again.
GroundStateSolver fake_solver(double threshold, double flip = -1.0) {
  return [=](const SystemParams& params, const SolveConfig&) {
    const double g = std::abs(params.coupling());
    GroundStateResult r{TriField(params.grid())};
    r.converged = true;
    const bool vec = g > threshold && g != flip;
    r.energy_value = vec ? 1.0 - g / 10.0 : 4.0 / 3.0;
    r.classification.kind = vec ? Classification::Kind::Vector : Classification::Kind::Scalar;
    if (!vec) r.classification.present = {true, false, false};
    return r;
  };
}

}  // namespace

TEST(Threshold, ScalarReferencesMatchSoliton) {
  for (double e : scalars().energies) EXPECT_NEAR(e, oracle::soliton_energy_1d(1.0), 1e-8);
}

TEST(Threshold, CandidateAtZeroCoupling) {
  const auto r = verify_vector_inequality(0.0, kParams, scalars());
  EXPECT_NEAR(r.candidate_energy, 3.0 * oracle::soliton_energy_1d(1.0), 1e-8);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.scale, 1.0, 1e-10);
}

TEST(Threshold, CandidateAtLargeCoupling) {
  const auto r = verify_vector_inequality(100.0, kParams, scalars());
  EXPECT_TRUE(r.holds);
  EXPECT_LT(r.candidate_energy, 4.0 / 3.0);
}

TEST(Threshold, CandidateScaleMatchesQuadraticOracle) {
  for (double g : {0.5, 1.0, 10.0, 1000.0}) {
    const double t = verify_vector_inequality(g, kParams, scalars()).scale;
    EXPECT_NEAR(t, oracle::t_gamma_p3(g), 1e-8 * oracle::t_gamma_p3(g)) << "gamma=" << g;
  }
}

TEST(Threshold, ReportSignSymmetric) {
  for (double g : {0.7, 3.0, 50.0}) {
    const auto a = verify_vector_inequality(g, kParams, scalars());
    const auto b = verify_vector_inequality(-g, kParams, scalars());
    EXPECT_EQ(a.candidate_energy, b.candidate_energy);
    EXPECT_EQ(a.scale, b.scale);
    EXPECT_EQ(a.holds, b.holds);
  }
}

TEST(Threshold, TGammaDecreases) {
  const auto r = t_gamma_limit_check(kParams, scalars(), {1, 10, 100, 1000});
  EXPECT_TRUE(r.strictly_decreasing);
  EXPECT_TRUE(r.decays_tenfold);
  EXPECT_THROW(t_gamma_limit_check(kParams, scalars(), {10, 1}), InvalidArgument);
}

TEST(Threshold, GammaSeedIsSignBlind) {
  EXPECT_EQ(gamma_seed(42, 1.5), gamma_seed(42, -1.5));
  EXPECT_NE(gamma_seed(42, 1.5), gamma_seed(42, 2.5));
  EXPECT_EQ(gamma_seed(42, 0.0), gamma_seed(42, -0.0));
}

TEST(Gamma0, BisectsMonotoneTable) {
  SweepConfig sweep;
  sweep.gammas = {0, 1, 2, 3, 4};
  const auto est = estimate_gamma0(kParams, sweep, scalars(), fake_solver(1.2345));
  ASSERT_TRUE(est.gamma0.has_value()) << est.status;
  EXPECT_TRUE(est.monotone);
  EXPECT_LE(est.bracket_hi - est.bracket_lo, 1e-3);
  EXPECT_NEAR(*est.gamma0, 1.2345, 1e-3);
  EXPECT_EQ(est.table.size(), 5u);
  EXPECT_FALSE(est.trace.empty());
}

TEST(Gamma0, DeclinesNonMonotoneTable) {
  SweepConfig sweep;
  sweep.gammas = {0, 1, 2, 3, 4};
  const auto est = estimate_gamma0(kParams, sweep, scalars(), fake_solver(0.5, 3.0));
  EXPECT_FALSE(est.gamma0.has_value());
  EXPECT_FALSE(est.monotone);
  EXPECT_EQ(est.table.size(), 5u);
  EXPECT_TRUE(est.trace.empty());
}

TEST(Gamma0, NoVectorInSweep) {
  SweepConfig sweep;
  sweep.gammas = {0, 0.5};
  const auto est = estimate_gamma0(kParams, sweep, scalars(), fake_solver(10.0));
  EXPECT_FALSE(est.gamma0.has_value());
}

TEST(Sweep, CsvLayout) {
  SweepConfig sweep;
  sweep.gammas = {0, 2, 4};
  const auto rows = run_sweep(kParams, sweep, scalars(), fake_solver(1.0));
  const auto csv = sweep_csv(rows, {"note"});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "gamma,m,E_cand,E_scal,classification,residual_rel,converged");
  int data = 0, comments = 0;
  while (std::getline(in, line)) (line.rfind("# ", 0) == 0 ? comments : data)++;
  EXPECT_EQ(data, 3);
  EXPECT_EQ(comments, 1);
  EXPECT_EQ(rows[1].classification.to_string(), "vector");
}

TEST(Sweep, RealSolverSmallCoupling) {
  SweepConfig sweep;
  sweep.gammas = {0.0, 3.0};
  sweep.solve.threads = 4;
  const auto rows = run_sweep(kParams, sweep, scalars());
  EXPECT_FALSE(rows[0].vector_ground_state(sweep.vector_margin));
  EXPECT_TRUE(rows[1].vector_ground_state(sweep.vector_margin));
  EXPECT_LT(rows[1].m, rows[1].e_cand + 1e-10);
}
