#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "critmass/barriers.hpp"
#include "critmass/constants.hpp"
#include "critmass/errors.hpp"
#include "critmass/solver.hpp"
#include "oracles.hpp"

using namespace critmass;

namespace {

SchemeConfig scheme_for(const GridPtr& g, double t_end) {
  SchemeConfig c;
  c.grid = g;
  c.t_end = t_end;
  c.snapshot_every = t_end;
  return c;
}

std::vector<double> nodes(const GridPtr& g) { return {g->nodes().begin(), g->nodes().end()}; }

}  // namespace

TEST(Step, LinearProfileIsAFixedPoint) {
  const GridPtr g = Grid::graded(128, 2.0);
  const MassProfile line = MassProfile::linear(g, kCriticalMass);
  EXPECT_TRUE(std::isinf(max_stable_dt(line)));
  for (double dt : {1e-4, 1.0, 100.0}) {
    const StepResult r = step(line, dt);
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(r.profile[i], line[i], 1e-13);
  }
}

TEST(Step, BoundaryValuesExactAndMonotone) {
  const GridPtr g = Grid::graded(256, 1.0);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    const double m = kCriticalMass * (0.2 + 0.1 * k);
    const MassProfile M(g, oracle::random_monotone(nodes(g), m, rng), m);
    const StepResult r = step(M, max_stable_dt(M, 0.45));
    EXPECT_EQ(r.profile[0], 0.0);
    EXPECT_EQ(r.profile[g->size() - 1], m);
    for (std::size_t i = 1; i < g->size(); ++i) {
      EXPECT_GE(r.profile[i] - r.profile[i - 1], -1e-12 * m);
    }
  }
}

TEST(Step, RejectsStepsAboveTransportLimit) {
  const GridPtr g = Grid::graded(64, 1.0);
  const MassProfile M = preset_profile(PresetKind::pks, 0.2, kCriticalMass, g);
  const double limit = max_stable_dt(M);
  EXPECT_THROW(step(M, 2.0 * limit), CflViolation);
  EXPECT_NO_THROW(step(M, limit));
  EXPECT_THROW(step(M, -1.0), std::invalid_argument);
}

TEST(Step, StaysBelowSuperBarrier) {
  const GridPtr g = Grid::graded(256, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double m = kCriticalMass * (0.1 + 0.9 * uni(rng));
    const double a = std::pow(10.0, -2.0 + 3.0 * uni(rng));
    const SuperBarrier w(a, m);
    std::vector<double> v = oracle::random_monotone(nodes(g), m, rng);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(v[i], w.value((*g)[i]));
    v.back() = m;
    MassProfile M(g, v, m);
    for (int s = 0; s < 20; ++s) {
      // the transport limit is infinite once the profile reaches the line
      M = step(M, std::min(max_stable_dt(M, 0.45), 0.1)).profile;
      for (std::size_t i = 0; i < g->size(); ++i) {
        ASSERT_LE(M[i], w.value((*g)[i]) + 1e-10 * m) << "a=" << a << " node " << i;
      }
    }
  }
}

TEST(Simulate, ConstantDataStaysConstant) {
  const GridPtr g = Grid::graded(64, 1.0);
  const MassProfile line = MassProfile::linear(g, 4.0 * kPi);
  const SimulationTrace t = simulate(scheme_for(g, 1.0), line);
  EXPECT_EQ(t.verdict, Verdict::completed);
  EXPECT_FALSE(detect_blowup(0.0, line, scheme_for(g, 1.0)).has_value());
  for (const Diagnostics& d : t.rows) {
    EXPECT_NEAR(d.sup_u, 4.0, 1e-12);
    EXPECT_NEAR(d.sup_ratio, 4.0 * kPi, 1e-12);
    EXPECT_NEAR(d.energy, t.rows.front().energy, 1e-12);
    EXPECT_NEAR(d.dissipation, 0.0, 1e-12);
    EXPECT_NEAR(d.second_moment, 2.0 * kPi, 1e-12);
  }
  EXPECT_NEAR(bound_gradient_v(t), 4.0, 1e-12);  // (m + m) / (2 pi)
}

TEST(Simulate, CriticalMassSmoothDataConverges) {
  const GridPtr g = Grid::graded(1024, 2.0);
  SchemeConfig c = scheme_for(g, 50.0);
  c.snapshot_every = 10.0;
  const SimulationTrace t = simulate(c, preset_profile(PresetKind::pks, 1.0, kCriticalMass, g));
  ASSERT_EQ(t.verdict, Verdict::completed);
  ASSERT_TRUE(t.final_profile);
  const RadialField u = density_from_mass(*t.final_profile);
  double worst = 0.0;
  for (double v : u.values()) worst = std::max(worst, std::abs(v - 8.0) / 8.0);
  EXPECT_LT(worst, 1e-2);
  EXPECT_EQ(t.snapshots.size(), 6u);
  for (std::size_t k = 1; k < t.rows.size(); ++k) ASSERT_GT(t.rows[k].t, t.rows[k - 1].t);
}

TEST(Simulate, SupercriticalConcentratedDataBlowsUpAtOrigin) {
  const GridPtr g = Grid::graded(512, 3.0);
  const SchemeConfig c = scheme_for(g, 10.0);
  const MassProfile m0 = preset_profile(PresetKind::barrier, 0.01, 10.0 * kPi, g);
  EXPECT_NEAR(second_moment(m0).value / (10.0 * kPi), 0.037, 5e-3);
  const SimulationTrace t = simulate(c, m0);
  ASSERT_EQ(t.verdict, Verdict::blowup_detected);
  ASSERT_TRUE(t.blowup);
  EXPECT_EQ(t.blowup->node, 1u);
  EXPECT_EQ(t.blowup->xi_peak, (*g)[1]);
  EXPECT_LT(t.blowup->time, 10.0);
  // the gradient bound grows with the peak
  EXPECT_GT(bound_gradient_v(t), 1e3);
}

TEST(Simulate, DeterministicTrace) {
  const GridPtr g = Grid::graded(128, 2.0);
  const MassProfile m0 = preset_profile(PresetKind::pks, 0.1, kCriticalMass, g);
  const SimulationTrace a = simulate(scheme_for(g, 0.5), m0);
  const SimulationTrace b = simulate(scheme_for(g, 0.5), m0);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].t, b.rows[k].t);
    EXPECT_EQ(a.rows[k].sup_u, b.rows[k].sup_u);
    EXPECT_EQ(a.rows[k].energy, b.rows[k].energy);
  }
}

TEST(SchemeConfig, Validation) {
  const GridPtr g = Grid::graded(64, 1.0);
  SchemeConfig c = scheme_for(g, 1.0);
  EXPECT_NO_THROW(c.validate(1.0));
  EXPECT_THROW(c.validate(0.0), std::invalid_argument);
  c.cfl = 1.5;
  EXPECT_THROW(c.validate(1.0), std::invalid_argument);
  c = scheme_for(g, -1.0);
  EXPECT_THROW(c.validate(1.0), std::invalid_argument);
  EXPECT_NEAR(scheme_for(g, 1.0).blowup_threshold(kPi), 1e6, 1e-6);
}

TEST(Comparison, IdenticalDataHasNoViolation) {
  const GridPtr g = Grid::graded(128, 1.0);
  const MassProfile m0 = preset_profile(PresetKind::pks, 0.3, kCriticalMass, g);
  const ComparisonReport r = verify_discrete_comparison(m0, m0, 0.5, scheme_for(g, 0.5));
  EXPECT_EQ(r.max_violation, 0.0);
  EXPECT_GT(r.steps, 0u);
}

TEST(Comparison, BarrierPairStaysOrdered) {
  const GridPtr g = Grid::graded(256, 1.0);
  const double m = kCriticalMass;
  const SubBarrier lo(1.0, m);
  const SuperBarrier hi(1.0, m);
  const MassProfile lower(g, lo.sample(*g), m);
  const MassProfile upper(g, hi.sample(*g), m);
  const ComparisonReport r = verify_discrete_comparison(lower, upper, 1.0, scheme_for(g, 1.0));
  EXPECT_LE(r.max_violation, 1e-10 * m);
}

TEST(Comparison, UpperStaysAboveLine) {
  const GridPtr g = Grid::graded(256, 1.0);
  const double m = kCriticalMass;
  const MassProfile line = MassProfile::linear(g, m);
  const MassProfile upper(g, SuperBarrier(1.0, m).sample(*g), m);
  const ComparisonReport r = verify_discrete_comparison(line, upper, 1.0, scheme_for(g, 1.0));
  EXPECT_LE(r.max_violation, 1e-10 * m);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_GE(r.upper[i], m * (*g)[i] - 1e-10 * m);
}

TEST(Comparison, UnorderedDataRejected) {
  const GridPtr g = Grid::graded(64, 1.0);
  const double m = kPi;
  const MassProfile line = MassProfile::linear(g, m);
  const MassProfile upper(g, SuperBarrier(1.0, m).sample(*g), m);
  EXPECT_THROW(verify_discrete_comparison(upper, line, 0.1, scheme_for(g, 0.1)), NodeError);
}

TEST(GradientBound, CriticalRunBelowBarrierValue) {
  const GridPtr g = Grid::graded(256, 1.0);
  const double m = kCriticalMass;
  const double a = 0.5;
  const MassProfile m0(g, SuperBarrier(a, m).sample(*g), m);
  const SimulationTrace t = simulate(scheme_for(g, 1.0), m0);
  EXPECT_LE(bound_gradient_v(t), (m * (a + 1.0) / a + m) / (2.0 * kPi) + 1e-9);
}
