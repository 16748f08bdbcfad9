#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"

using namespace pulsefront;

namespace {

// frozen from oracles/freeze.cpp (dense eigen-solve / matrix exponential)
constexpr double kLambda0Tri4 = -0.040643956921825222;
constexpr double kLambda0Tri1 = -0.32450176582659951;
constexpr double kLambda0Gauss3 = -0.091545543684202355;
constexpr double kStarHalf = 0.85676313710454066;
constexpr double kStarOne = 0.42260996817193025;
constexpr double kStarMixed = 0.88015850428372333;
constexpr double kStarTau2 = -0.14633473129959307;
constexpr double kOdeHalf = 0.81611918018271867;
constexpr double kOdeB4 = -0.42907625564568852;

EigenProblemSpec spec(double L1, double L2, double slope, std::size_t n, std::size_t steps = 256) {
  EigenProblemSpec s;
  s.left = L1;
  s.length = L2 - L1;
  s.slope = slope;
  s.n = n;
  s.steps = steps;
  return s;
}

}  // namespace

TEST_CASE("oracle reproduces its frozen values") {
  const Kernel tri = Kernel::triangular(1.0);
  CHECK(oracle::lambda0(tri, 4.0, 64) == doctest::Approx(kLambda0Tri4).epsilon(1e-12));
  CHECK(oracle::lambda_star(tri, tri, 4.0, 64, {}, 0.5) == doctest::Approx(kStarHalf).epsilon(1e-12));
  CHECK(oracle::ode_lambda({}, 0.5) == doctest::Approx(kOdeHalf).epsilon(1e-12));
}

TEST_CASE("lambda0 against the dense spectrum") {
  CHECK(lambda0(Kernel::triangular(1.0), 4.0, 64).lambda == doctest::Approx(kLambda0Tri4).epsilon(1e-11));
  CHECK(lambda0(Kernel::triangular(1.0), 1.0, 64).lambda == doctest::Approx(kLambda0Tri1).epsilon(1e-11));
  CHECK(lambda0(Kernel::truncated_gaussian(0.5), 3.0, 60).lambda ==
        doctest::Approx(kLambda0Gauss3).epsilon(1e-11));
  const EigenResult r = lambda0(Kernel::triangular(1.0), 4.0, 64);
  CHECK(r.x.size() == 65);
  for (double v : r.phi) CHECK(v > 0.0);
  CHECK(r.lambda > -1.0);
  CHECK(r.lambda < 0.0);
}

TEST_CASE("closed form and Floquet against the matrix exponential") {
  CHECK(closed_form_lambda(spec(-2, 2, 0.5, 64)).lambda == doctest::Approx(kStarHalf).epsilon(1e-10));
  CHECK(closed_form_lambda(spec(-2, 2, 1.0, 64)).lambda == doctest::Approx(kStarOne).epsilon(1e-10));
  const EigenResult f = floquet_lambda(spec(-2, 2, 0.5, 64));
  CHECK(f.lambda == doctest::Approx(kStarHalf).epsilon(1e-9));
  CHECK(f.method == EigenMethod::Floquet);
  CHECK_FALSE(f.surrogate);
  CHECK(f.residual < 1e-10);
}

TEST_CASE("distinct kernels give a labeled surrogate") {
  EigenProblemSpec s = spec(-2, 2, 0.5, 64);
  s.k2 = Kernel::triangular(1.5);
  const EigenResult f = floquet_lambda(s);
  CHECK(f.surrogate);
  CHECK(f.lambda == doctest::Approx(kStarMixed).epsilon(1e-9));
  CHECK_THROWS_AS(closed_form_lambda(s), ConfigError);
}

TEST_CASE("Floquet with a longer period and asymmetric rates") {
  EigenProblemSpec s = spec(0, 2, 0.8, 48, 512);
  s.coeffs.b = 3.0;
  s.coeffs.d2 = 0.5;
  s.coeffs.tau = 2.0;
  CHECK(floquet_lambda(s).lambda == doctest::Approx(kStarTau2).epsilon(1e-9));
}

TEST_CASE("no pulse collapses the closed form") {
  const EigenResult r = closed_form_lambda(spec(-2, 2, 1.0, 64));
  CHECK(r.m == 0.0);
  CHECK(r.Lambda == 1.0);
  CHECK(r.lambda == doctest::Approx(-r.c1).epsilon(1e-14));
  const auto [c1, c2] = characteristic_roots(Coefficients{}, r.lambda0);
  CHECK(c1 == r.c1);
  CHECK(c1 > c2);
  // roots of the 2x2 characteristic polynomial
  const double M11 = r.lambda0 - 2.0, M22 = r.lambda0 - 1.0;
  CHECK((M11 - c1) * (M22 - c1) - 1.0 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("closed form time factors are positive") {
  const EigenResult r = closed_form_lambda(spec(-2, 2, 0.5, 64));
  REQUIRE(r.alpha.size() == r.time.size());
  for (std::size_t k = 0; k < r.alpha.size(); ++k) {
    CHECK(r.alpha[k] > 0.0);
    CHECK(r.beta[k] > 0.0);
  }
  CHECK_THROWS_AS(closed_form_from_lambda0(Coefficients{}, 1.2, -0.1), ConfigError);
}

TEST_CASE("whole-line eigenvalue") {
  CHECK(ode_floquet_lambda(Coefficients{}, 0.5) == doctest::Approx(kOdeHalf).epsilon(1e-12));
  Coefficients c;
  c.b = 4.0;
  CHECK(ode_floquet_lambda(c, 0.8) == doctest::Approx(kOdeB4).epsilon(1e-12));

  // piecewise constant reproduction: product of the two slot exponentials
  Coefficients pw;
  pw.b = PeriodicFunction(std::vector<double>{2.0, 6.0});
  oracle::Rates lo, hi;
  lo.b = 2.0;
  hi.b = 6.0;
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
  P(1, 1) = 0.7;
  const Eigen::Matrix2d M = (oracle::ode_generator(hi) * 0.5).exp() * (oracle::ode_generator(lo) * 0.5).exp() * P;
  const double tr = M.trace(), det = M.determinant();
  const double expect = -std::log(0.5 * (tr + std::sqrt(tr * tr - 4 * det)));
  CHECK(ode_floquet_lambda(pw, 0.7) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("translation invariance is exact") {
  const EigenProblemSpec s = spec(-2, 2, 0.5, 64);
  const EigenProblemSpec t = translate_interval(s, 3.75);
  CHECK(t.L1() == 1.75);
  CHECK(floquet_lambda(t).lambda == floquet_lambda(s).lambda);
  CHECK(closed_form_lambda(t).lambda == closed_form_lambda(s).lambda);
}

TEST_CASE("lambda decreases with the interval and with H'(0)") {
  double prev = 1e9;
  for (double L : {1.0, 2.0, 4.0}) {
    const double v = closed_form_lambda(spec(0, L, 0.5, 64)).lambda;
    CHECK(v < prev);
    prev = v;
  }
  prev = 1e9;
  for (double s : {0.3, 0.6, 0.9}) {
    const double v = closed_form_lambda(spec(0, 2, s, 64)).lambda;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("sensitivity matches finite differences") {
  const double h = 1e-5;
  for (double s : {0.4, 0.8}) {
    const double d = lambda_sensitivity(spec(-2, 2, s, 64));
    const double fd = (closed_form_lambda(spec(-2, 2, s + h, 64)).lambda -
                       closed_form_lambda(spec(-2, 2, s - h, 64)).lambda) / (2 * h);
    CHECK(d < 0.0);
    CHECK(d == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("bracket") {
  const EigenProblemSpec s = spec(-2, 2, 0.5, 64);
  const GeneralizedBracket b = generalized_bracket(s);
  CHECK(b.lower <= b.upper);
  CHECK(b.lower == doctest::Approx(kStarHalf).epsilon(1e-9));
  CHECK(b.upper == doctest::Approx(kStarHalf).epsilon(1e-9));
  EigenProblemSpec m = s;
  m.k2 = Kernel::triangular(1.5);
  const GeneralizedBracket bm = generalized_bracket(m);
  CHECK(bm.lower <= bm.surrogate);
  CHECK(bm.surrogate <= bm.upper);
  CHECK_FALSE(bm.witness.empty());
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(spec(1, 1, 0.5, 64).validate(), ConfigError);
  CHECK_THROWS_AS(spec(0, 1, 0.0, 64).validate(), ConfigError);
  CHECK_THROWS_AS(spec(0, 1, 0.5, 4).validate(), ConfigError);
  CHECK(richardson(1.0, 2.0) == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("2x2 exponential") {
  const Mat2 M{-2.0, 1.0, 1.0, -1.0};
  Eigen::Matrix2d E;
  E << -2.0, 1.0, 1.0, -1.0;
  const Eigen::Matrix2d ref = (E * 0.7).exp();
  const Mat2 got = expm2(M, 0.7);
  CHECK(got[0] == doctest::Approx(ref(0, 0)).epsilon(1e-14));
  CHECK(got[1] == doctest::Approx(ref(0, 1)).epsilon(1e-14));
  CHECK(got[2] == doctest::Approx(ref(1, 0)).epsilon(1e-14));
  CHECK(got[3] == doctest::Approx(ref(1, 1)).epsilon(1e-14));
}
