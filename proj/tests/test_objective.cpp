#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "smde/error.hpp"
#include "smde/objective.hpp"

using namespace smde;

namespace {

Sample draw_sample(const ParamVector& p, std::size_t n, std::uint64_t stream) {
  RandomStream r(31337, stream);
  return sample(p, n, r);
}

double quad2(const ParamVector& p, const Sample& s, double a) {
  const double v = psi_quadrature(p, s, LqWeightConfig{2.0, a}).value;
  return v * v;
}

}  // namespace

TEST(Eta, Examples) {
  const Sample one({1.0});
  EXPECT_DOUBLE_EQ(eta_n(2.0, ParamVector(Family::Exponential, {1.0}), one), 0.0);
  EXPECT_DOUBLE_EQ(eta_n(0.5, ParamVector(Family::Exponential, {1.0}), one), 0.5);
  EXPECT_DOUBLE_EQ(eta_n(1.0, ParamVector(Family::Rayleigh, {1.0}), one), -1.0);
  EXPECT_THROW(eta_n(0.0, ParamVector(Family::Rayleigh, {1.0}), one), DomainError);
}

TEST(Eta, PiecewiseLinearWithKnotsAtOrderStatistics) {
  const ParamVector p(Family::Burr, {2.0, 5.0});
  const Sample s = draw_sample(p, 12, 1);
  const EtaSegments seg = eta_segments(p, s);
  ASSERT_EQ(seg.knots.size(), 13u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = seg.knots[i], hi = seg.knots[i + 1];
    const double mid = 0.5 * (lo + hi);
    EXPECT_NEAR(eta_n(mid, p, s), seg(mid), 1e-13);
    // Midpoint of an affine piece is the average of the one-sided endpoint values.
    const double l = eta_n(lo + 1e-9 * (hi - lo), p, s), r = eta_n(hi - 1e-9 * (hi - lo), p, s);
    EXPECT_NEAR(eta_n(mid, p, s), 0.5 * (l + r), 1e-9);
    EXPECT_NEAR(eta_n(hi, p, s), seg(hi), 1e-13);
  }
  EXPECT_NEAR(eta_n(s.max() * 1.5, p, s), seg.tail, 1e-13);
  EXPECT_NEAR(eta_n(s.max() * 10.0, p, s), seg.tail, 1e-13);
}

TEST(PsiQuadrature, SingleObservation) {
  const Sample one({1.0});
  const double v = psi_quadrature(ParamVector(Family::Exponential, {1.0}), one, {2.0, 1.0}).value;
  EXPECT_NEAR(v * v, 2.0 - 5.0 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(v, 0.400753, 1e-6);
}

TEST(PsiQuadrature, ConfigValidation) {
  const Sample one({1.0});
  const ParamVector p(Family::Exponential, {1.0});
  EXPECT_THROW(psi_quadrature(p, one, LqWeightConfig{0.5, 1.0}), DomainError);
  EXPECT_THROW(psi_quadrature(p, one, LqWeightConfig{2.0, 0.0}), DomainError);
}

TEST(PsiQuadrature, ZeroOnlyWhenEtaVanishes) {
  // Exponential with ϑ = 1/X for a single point X: η = t/X - 1{t >= X} on (0, X), so not zero.
  const Sample one({2.0});
  EXPECT_GT(psi_quadrature(ParamVector(Family::Exponential, {0.5}), one, {2.0, 1.0}).value, 0.0);
}

TEST(ClosedForm, ExponentialMatchesQuadrature) {
  const Sample s = draw_sample(ParamVector(Family::Exponential, {1.0}), 8, 2);
  const auto cf = psi2_closed_exponential(1.3, s, 0.5);
  EXPECT_NEAR(cf.psi2, quad2(ParamVector(Family::Exponential, {1.3}), s, 0.5), 1e-6 * cf.psi2);
  EXPECT_GT(cf.Psi1, 0.0);
  EXPECT_LT(cf.Psi2, 0.0);
}

TEST(ClosedForm, RayleighMatchesQuadrature) {
  const Sample s = draw_sample(ParamVector(Family::Rayleigh, {1.0}), 8, 3);
  const auto cf = psi2_closed_rayleigh(0.9, s, 1.0);
  EXPECT_NEAR(cf.psi2, quad2(ParamVector(Family::Rayleigh, {0.9}), s, 1.0), 1e-6 * cf.psi2);
  EXPECT_GT(cf.Psi1, 0.0);
  EXPECT_LT(cf.Psi2, 0.0);
}

TEST(ClosedForm, BurrMatchesQuadrature) {
  const Sample s = draw_sample(ParamVector(Family::Burr, {2.0, 5.0}), 6, 4);
  for (double a : {1.0, 3.0}) {
    const double cf = psi2_closed_burr(2.0, 5.0, s, a);
    EXPECT_NEAR(cf, quad2(ParamVector(Family::Burr, {2.0, 5.0}), s, a), 1e-6 * cf);
  }
  EXPECT_TRUE(std::isfinite(psi2_closed_burr(1.0, 1e-4, s, 1.0)));
}

TEST(ClosedForm, ExpPolyDifferencesMatchQuadrature) {
  const Sample s = draw_sample(ParamVector(Family::ExpPoly, {0.0, -0.5}), 6, 5);
  const ParamVector p(Family::ExpPoly, {0.4, -0.3}), q(Family::ExpPoly, {-1.0, -0.9});
  const double lhs = psi2_closed_exppoly(p[0], p[1], s, 1.0).psi2 -
                     psi2_closed_exppoly(q[0], q[1], s, 1.0).psi2;
  const double rhs = quad2(p, s, 1.0) - quad2(q, s, 1.0);
  EXPECT_NEAR(lhs, rhs, 1e-6 * std::max(1.0, std::abs(rhs)));
}

TEST(ClosedForm, ExpPolyConstantIsFullValueAtOrigin) {
  // With ϑ = 0 the score vanishes and η_n = -F_n, so the full ψ² is the constant term.
  const Sample s = draw_sample(ParamVector(Family::ExpPoly, {0.0, -0.5}), 9, 6);
  const auto cf = psi2_closed_exppoly(0.0, 0.0, s, 2.0);
  EXPECT_DOUBLE_EQ(cf.psi2, cf.constant);
  const double direct = quad2(ParamVector(Family::ExpPoly, {0.0, -1e-300}), s, 2.0);
  EXPECT_NEAR(cf.constant, direct, 1e-9 * direct);
  const auto g = cf.gradient(0.0, 0.0);
  EXPECT_DOUBLE_EQ(g[0], cf.Psi4);
  EXPECT_DOUBLE_EQ(g[1], cf.Psi5);
}

TEST(ClosedForm, ExpPolyFullValueMatchesQuadrature) {
  const Sample s = draw_sample(ParamVector(Family::ExpPoly, {1.0, -0.05}), 7, 7);
  const ParamVector p(Family::ExpPoly, {0.7, -0.2});
  const double cf = psi2_closed_exppoly(p[0], p[1], s, 0.8).psi2;
  EXPECT_NEAR(cf, quad2(p, s, 0.8), 1e-6 * cf);
}

TEST(ClosedForm, ExpPolyHessianConstant) {
  const Sample s = draw_sample(ParamVector(Family::ExpPoly, {0.0, -0.5}), 10, 8);
  const auto cf = psi2_closed_exppoly(0.0, -0.5, s, 1.0);
  const double h = 1e-3;
  for (auto [x, y] : {std::pair{0.0, -0.5}, {2.0, -3.0}}) {
    const auto gx1 = cf.gradient(x + h, y), gx0 = cf.gradient(x - h, y);
    const auto gy1 = cf.gradient(x, y + h), gy0 = cf.gradient(x, y - h);
    EXPECT_NEAR((gx1[0] - gx0[0]) / (2 * h), 2.0 * cf.Psi1, 1e-9 * std::abs(cf.Psi1) + 1e-12);
    EXPECT_NEAR((gy1[1] - gy0[1]) / (2 * h), 2.0 * cf.Psi2, 1e-9 * std::abs(cf.Psi2) + 1e-12);
    EXPECT_NEAR((gx1[1] - gx0[1]) / (2 * h), cf.Psi3, 1e-9 * std::abs(cf.Psi3) + 1e-12);
  }
}

TEST(ClosedForm, RandomTriplesAgreeWithQuadrature) {
  RandomStream r(99, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = 0.25 + 4.75 * r.uniform_open();
    const std::size_t n = 2 + static_cast<std::size_t>(20 * r.uniform_open());
    const ParamVector pe(Family::Exponential, {0.2 + 3.0 * r.uniform_open()});
    const Sample se = draw_sample(pe, n, 100 + trial);
    const double ce = psi2_closed(pe, se, a).value;
    EXPECT_NEAR(ce, quad2(pe, se, a), 1e-6 * std::max(1.0, ce));

    const ParamVector pr(Family::Rayleigh, {0.3 + 3.0 * r.uniform_open()});
    const Sample sr = draw_sample(pr, n, 200 + trial);
    const double cr = psi2_closed(pr, sr, a).value;
    EXPECT_NEAR(cr, quad2(pr, sr, a), 1e-6 * std::max(1.0, cr));

    const ParamVector pb(Family::Burr, {0.5 + 3.0 * r.uniform_open(), 0.5 + 5.0 * r.uniform_open()});
    const Sample sb = draw_sample(pb, n, 300 + trial);
    const double cb = psi2_closed(pb, sb, a).value;
    EXPECT_NEAR(cb, quad2(pb, sb, a), 1e-6 * std::max(1.0, cb));
  }
}

TEST(Limit, Values) {
  const Sample s({0.5, 1.0, 4.0});
  EXPECT_DOUBLE_EQ(limit_objective(ParamVector(Family::Exponential, {1.5}), s, 2.0), 2.0 * 2.25);
  double m = 0.0;
  for (double x : {0.5, 1.0, 4.0}) m += 1.0 / x - x / 4.0;
  m /= 3.0;
  EXPECT_NEAR(limit_objective(ParamVector(Family::Rayleigh, {2.0}), s, 2.0), 2.0 * m * m, 1e-15);
  EXPECT_NEAR(limit_objective(ParamVector(Family::Exponential, {1.5}), s, 1.0), 1.5, 1e-15);
}

TEST(Limit, ExponentialRateOfApproach) {
  // The gap a³ψ² - 2ϑ² decays like e^{-a X_(1)}; small observations keep it
  // representable up to a = 10⁴.
  const Sample s = draw_sample(ParamVector(Family::Exponential, {50.0}), 20, 9);
  const double theta = 1.7;
  std::vector<double> la, le;
  for (double a : {1e2, 1e3, 1e4}) {
    const double err = std::abs(a * a * a * psi2_closed_exponential(theta, s, a).psi2 - 2 * theta * theta);
    ASSERT_GT(err, 0.0);
    la.push_back(std::log(a));
    le.push_back(std::log(err));
  }
  const double slope = (le[2] - le[0]) / (la[2] - la[0]);
  EXPECT_LE(slope, -0.9);
}

TEST(Scaling, ExponentialObjectiveEquivariance) {
  const Sample s = draw_sample(ParamVector(Family::Exponential, {1.0}), 15, 10);
  const double c = 2.5, theta = 0.8, a = 0.7;
  std::vector<double> scaled;
  for (std::size_t i = 0; i < s.size(); ++i) scaled.push_back(c * s[i]);
  const Sample cs(scaled);
  for (double q : {1.0, 2.0, 3.0}) {
    const double lhs = psi_quadrature(ParamVector(Family::Exponential, {theta / c}), cs, {q, a}).value;
    const double rhs =
        std::pow(c, 1.0 / q) * psi_quadrature(ParamVector(Family::Exponential, {theta}), s, {q, a * c}).value;
    EXPECT_NEAR(lhs, rhs, 1e-8 * rhs) << "q=" << q;
  }
}
