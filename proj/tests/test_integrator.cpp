#include <cmath>

#include <gtest/gtest.h>

#include "homdelay/integrator.hpp"
#include "homdelay/registry.hpp"
#include "order_check.hpp"

namespace homdelay {
namespace {

// ẋ = -y³: linear on [0, h] and a quartic on [h, 2h] for constant φ.
HomogeneousRHS PureDelayCubic(double h) {
  const Rational three(3), zero(0);
  return HomogeneousRHS::FromTerms(1, three, h, {{0, -1.0, {zero}, {three}}});
}

GTEST_TEST(IntegratorTest, ZeroHistoryStaysZero) {
  const SystemModel ex1 = build_example({});
  const auto phi = HistorySegment::Constant(10.0, Vector::Zero(1));
  const Trajectory traj = integrate(ex1.rhs, phi, 50.0, 0.1);
  ASSERT_EQ(traj.size(), 501u);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_EQ(traj.state(k)[0], 0.0);
  }
}

GTEST_TEST(IntegratorTest, PureDelayMatchesClosedForm) {
  const double h = 1.0, c = 0.5;
  const auto rhs = PureDelayCubic(h);
  const auto phi = HistorySegment::Constant(h, Vector::Constant(1, c));
  const Trajectory traj = integrate(rhs, phi, 2.0 * h, 0.01);
  const double c3 = c * c * c;
  const double xh = c - c3 * h;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.time(k);
    double exact = 0.0;
    if (t <= h) {
      exact = c - c3 * t;
    } else {
      const double s = t - h;
      exact = xh + (std::pow(c - c3 * s, 4) - std::pow(c, 4)) / (4.0 * c3);
    }
    EXPECT_NEAR(traj.state(k)[0], exact, 1e-13) << "t=" << t;
  }
}

GTEST_TEST(IntegratorTest, StepHalvingShowsFourthOrder) {
  const auto study = testing::RunOrderStudy();
  ASSERT_EQ(study.ratios.size(), 3u);
  for (double r : study.ratios) {
    EXPECT_GE(r, 14.0);
    EXPECT_LE(r, 18.0);
  }
  EXPECT_LT(study.errors.back(), 1e-8);
}

GTEST_TEST(IntegratorTest, StepMustDivideDelay) {
  const SystemModel ex1 = build_example({});
  const auto phi = HistorySegment::Constant(10.0, Vector::Constant(1, 0.1));
  EXPECT_THROW(integrate(ex1.rhs, phi, 10.0, 0.3), Error);
  EXPECT_THROW(integrate(ex1.rhs, phi, 10.0, -0.1), Error);
  EXPECT_NO_THROW(integrate(ex1.rhs, phi, 10.0, 0.25));
}

GTEST_TEST(IntegratorTest, RejectsMismatchedHistory) {
  const SystemModel ex1 = build_example({});
  EXPECT_THROW(integrate(ex1.rhs, HistorySegment::Constant(5.0, Vector::Zero(1)),
                         1.0, 0.1),
               Error);
  EXPECT_THROW(integrate(ex1.rhs, HistorySegment::Constant(10.0, Vector::Zero(2)),
                         1.0, 0.1),
               DimensionError);
}

GTEST_TEST(IntegratorTest, BlowUpGuardFires) {
  const Rational three(3), zero(0);
  const auto rhs =
      HomogeneousRHS::FromTerms(1, three, 1.0, {{0, 1.0, {three}, {zero}}});
  const auto phi = HistorySegment::Constant(1.0, Vector::Constant(1, 1.0));
  // ẋ = x³ from 1 explodes at t = 1/2.
  try {
    integrate(rhs, phi, 2.0, 1e-3);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.time(), 0.45);
    EXPECT_LT(e.time(), 0.55);
  }
}

GTEST_TEST(IntegratorTest, FullStorageLimit) {
  const SystemModel ex1 = build_example({});
  const auto phi = HistorySegment::Constant(10.0, Vector::Constant(1, 0.01));
  EXPECT_THROW(integrate(ex1.rhs, phi, 1e9, 0.01), Error);
}

GTEST_TEST(IntegratorTest, LogSpacedMatchesFullStorage) {
  const SystemModel ex1 = build_example({});
  const auto phi = HistorySegment::Constant(10.0, Vector::Constant(1, 0.05));
  const Trajectory full = integrate(ex1.rhs, phi, 200.0, 0.05);
  std::size_t observed = 0;
  IntegrationOptions io;
  io.output = OutputMode::kLogSpaced;
  io.points_per_decade = 20;
  io.observer = [&](double, ConstVectorRef) { ++observed; };
  const Trajectory thin = integrate(ex1.rhs, phi, 200.0, 0.05, io);
  EXPECT_EQ(observed, full.size());
  EXPECT_LT(thin.size(), full.size());
  EXPECT_EQ(thin.time(0), 0.0);
  EXPECT_DOUBLE_EQ(thin.time(thin.size() - 1), 200.0);
  for (std::size_t k = 0; k < thin.size(); ++k) {
    EXPECT_EQ(thin.state(k)[0], full.state(thin.grid_index(k))[0]);
  }
  EXPECT_THROW(thin.Evaluate(0.025), Error);
  EXPECT_EQ(thin.Evaluate(200.0)[0], full.state(full.size() - 1)[0]);
}

GTEST_TEST(IntegratorTest, DenseOutputInterpolates) {
  const auto rhs = PureDelayCubic(1.0);
  const auto phi = HistorySegment::Constant(1.0, Vector::Constant(1, 0.5));
  const Trajectory traj = integrate(rhs, phi, 1.0, 0.1);
  // Linear on [0, h]: the Hermite interpolant is exact.
  EXPECT_NEAR(traj.Evaluate(0.537)[0], 0.5 - 0.125 * 0.537, 1e-14);
  EXPECT_EQ(traj.Evaluate(-0.3)[0], 0.5);
  EXPECT_THROW(traj.Evaluate(1.5), Error);
}

GTEST_TEST(IntegratorTest, SupNormWindowAgainstDenseScan) {
  const SystemModel ex1 = build_example({});
  const auto phi = HistorySegment::FromFunction(
      10.0, 64, [](double th) { return Vector::Constant(1, 0.3 * std::sin(th)); },
      [](double th) { return Vector::Constant(1, 0.3 * std::cos(th)); });
  const Trajectory traj = integrate(ex1.rhs, phi, 30.0, 0.05);
  for (double t : {0.0, 3.3, 10.0, 17.25, 30.0}) {
    double scan = 0.0;
    for (int j = 0; j <= 20000; ++j) {
      scan = std::max(scan, std::abs(traj.Evaluate(t - 10.0 + 10.0 * j / 20000.0)[0]));
    }
    const double window = sup_norm_window(traj, t);
    EXPECT_LE(window, scan * (1 + 1e-12));
    EXPECT_NEAR(window, scan, 1e-4 * scan) << "t=" << t;
  }
  EXPECT_THROW(sup_norm_window(traj, 31.0), Error);
}

GTEST_TEST(IntegratorTest, LyapunovTraceIsSquare) {
  const SystemModel ex1 = build_example({});
  const auto phi = HistorySegment::Constant(10.0, Vector::Constant(1, 0.2));
  const Trajectory traj = integrate(ex1.rhs, phi, 20.0, 0.1);
  const TimeSeries v = lyapunov_trace(traj, ex1.lyapunov);
  ASSERT_EQ(v.t.size(), traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_DOUBLE_EQ(v.value[k], traj.state(k)[0] * traj.state(k)[0]);
  }
}

GTEST_TEST(IntegratorTest, DefaultStepDividesDelay) {
  for (double h : {0.3, 1.0, 7.0, 10.0, 123.4}) {
    const double s = default_step(h);
    EXPECT_LE(s, 0.01 + 1e-15);
    EXPECT_NEAR(h / s, std::round(h / s), 1e-9);
  }
  EXPECT_DOUBLE_EQ(default_horizon(10.0), 1e5);
}

}  // namespace
}  // namespace homdelay
