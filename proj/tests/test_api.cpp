#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <vector>

#include "ad/ad.hpp"
#include "support/testing.hpp"

using ad::ADMatrix;
using ad::ADScalar;
using ad::ADVector;
using ad::RealMatrix;
using ad::RealVector;

namespace {

double centralDifference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double secondDifference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

RealVector unit(std::size_t n, std::size_t i) {
  RealVector e(n, 0.0);
  e[i] = 1.0;
  return e;
}

double dotPlain(const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// x^T A x for a fixed symmetric A.
struct Quadratic {
  ADMatrix a;
  ADScalar operator()(const ADVector& x) const { return ad::dot(x, ad::matVec(a, x)); }
};

RealMatrix symmetric3() { return RealMatrix(3, 3, {2.0, -1.0, 0.5, -1.0, 3.0, 0.25, 0.5, 0.25, 1.0}); }

ADScalar rosenbrock(const ADVector& x) {
  const ADScalar a = 1.0 - x[0];
  const ADScalar b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

// Smooth scalar test function of any dimension with nontrivial cross terms.
ADScalar smooth(const ADVector& x) {
  ADScalar s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s = s + ad::sin(x[i] * x[(i + 1) % x.size()]) + ad::exp(0.3 * x[i]) * x[i];
  }
  return s * ad::log(2.0 + ad::tanh(ad::sum(x)));
}

ADVector smoothField(const ADVector& x) {
  std::vector<ADScalar> out;
  for (std::size_t k = 0; k < 4; ++k) {
    ADScalar s = static_cast<double>(k);
    for (std::size_t i = 0; i < x.size(); ++i) s = s + ad::cos(x[i] * (k + 1.0)) * x[(i + k) % x.size()];
    out.push_back(ad::atan(s));
  }
  return ADVector(std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------
// R -> R

TEST_CASE("diff examples") {
  CHECK(ad::diff([](const ADScalar& x) { return x * x * x; }, 2.0) == 12.0);
  CHECK(ad::diff([](const ADScalar& x) { return ad::sin(x); }, 0.0) == 1.0);
  const double oracle = centralDifference([](double x) { return x * std::sin(x * x); }, 1.3, 1e-6);
  const double got = ad::diff([](const ADScalar& x) { return x * ad::sin(x * x); }, 1.3);
  CHECK(std::abs(got - oracle) / std::abs(oracle) <= 1e-6);
}

TEST_CASE("diff2 examples") {
  CHECK(ad::diff2([](const ADScalar& x) { return x * x * x * x; }, 1.0) == 12.0);
  CHECK(ad::diff2([](const ADScalar& x) { return ad::sin(x); }, 0.0) == 0.0);
  const double oracle = secondDifference([](double x) { return std::exp(x) / x; }, 2.0, 1e-4);
  const double got = ad::diff2([](const ADScalar& x) { return ad::exp(x) / x; }, 2.0);
  // Exact value e^2 (x^2 - 2x + 2) / x^3 = e^2 / 4; the second difference is O(h^2) accurate.
  CHECK(std::abs(got - std::exp(2.0) / 4.0) <= 1e-14 * std::exp(2.0));
  CHECK(std::abs(got - oracle) / std::abs(oracle) <= 1e-5);

  const auto [f, d1, d2] = ad::diff2PrimePrime([](const ADScalar& x) { return x * x * x; }, 2.0);
  CHECK(f == 8.0);
  CHECK(d1 == 12.0);
  CHECK(d2 == 12.0);
}

TEST_CASE("diffn examples") {
  const auto x5 = [](const ADScalar& x) { return x * x * x * x * x; };
  CHECK(ad::diffn(3, x5, 1.0) == 60.0);
  CHECK(ad::diffn(0, x5, 1.3) == ad::detail::real(x5(1.3)));
  CHECK(ad::diffn(4, [](const ADScalar& x) { return ad::sin(x); }, 0.0) == 0.0);
  CHECK(ad::diffn(1, x5, 0.7) == ad::diff(x5, 0.7));
  CHECK(ad::diffn(5, x5, 0.7) == 120.0);
  CHECK(ad::diffn(6, x5, 0.7) == 0.0);
  CHECK(ad::diffn(4, [](const ADScalar& x) { return ad::exp(2.0 * x); }, 0.5) ==
        doctest::Approx(16.0 * std::exp(1.0)).epsilon(1e-14));
}

// ---------------------------------------------------------------------------
// R^n -> R

TEST_CASE("grad examples") {
  const auto sq = [](const ADVector& x) { return ad::dot(x, x); };
  CHECK(ad::grad(sq, RealVector{1, 2, 3}) == RealVector{2, 4, 6});
  CHECK(ad::grad([](const ADVector&) { return ADScalar(4.0); }, RealVector{1, 2}) == RealVector{0, 0});
  CHECK(ad::grad(rosenbrock, RealVector{1, 1}) == RealVector{0, 0});
  // Rosenbrock away from the minimum, against its analytic gradient.
  const double x = -1.2, y = 1.0;
  const RealVector g = ad::grad(rosenbrock, RealVector{x, y});
  CHECK(g[0] == doctest::Approx(-2.0 * (1 - x) - 400.0 * x * (y - x * x)).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(200.0 * (y - x * x)).epsilon(1e-15));
}

TEST_CASE("grad accepts length-1 vector outputs and rejects longer ones") {
  const RealVector g = ad::grad([](const ADVector& x) { return ADVector{x[0] * x[1]}; }, RealVector{2, 5});
  CHECK(g == RealVector{5, 2});
  CHECK_THROWS_AS(ad::grad([](const ADVector& x) { return ADVector{x[0], x[1]}; }, RealVector{2, 5}), ad::ShapeError);
  CHECK_THROWS_AS(ad::hessian([](const ADVector& x) { return ADVector{x[0], x[1]}; }, RealVector{2, 5}),
                  ad::ShapeError);
}

TEST_CASE("gradv examples") {
  const auto sq = [](const ADVector& x) { return ad::dot(x, x); };
  CHECK(ad::gradv(sq, RealVector{1, 2}, RealVector{1, 0}) == 2.0);
  CHECK(ad::gradv(sq, RealVector{1, 2}, RealVector{0, 0}) == 0.0);
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const adtest::TreeFunction f{adtest::Expr::random(rng, n, 5)};
    const RealVector x = adtest::randomVector(rng, n, -1.5, 1.5);
    const RealVector v = adtest::randomVector(rng, n, -1, 1);
    CAPTURE(f.tree->str());
    CHECK(adtest::relDiff(ad::gradv(f, x, v), dotPlain(ad::grad(f, x), v)) <= 1e-12);
  }
}

TEST_CASE("hessian examples") {
  const RealMatrix a = symmetric3();
  const Quadratic q{ADMatrix::constant(a)};
  const RealMatrix h = ad::hessian(q, RealVector{0.3, -0.7, 1.1});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(h(i, j) == doctest::Approx(2.0 * a(i, j)).epsilon(1e-15));

  const RealMatrix lin = ad::hessian([](const ADVector& x) { return 3.0 * x[0] - x[1] + 0.5 * x[2]; },
                                     RealVector{1, 2, 3});
  CHECK(lin == RealMatrix(3, 3, 0.0));

  // Sum over all i, j of sin(x_i x_j), against finite differences of its exact gradient.
  const auto f = [](const ADVector& x) {
    ADScalar s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) s = s + ad::sin(x[i] * x[j]);
    return s;
  };
  const RealVector x{0.4, -0.9, 1.3};
  const double step = 1e-5;
  const RealMatrix hf = ad::hessian(f, x);
  for (std::size_t j = 0; j < 3; ++j) {
    RealVector xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    const RealVector gp = ad::grad(f, xp), gm = ad::grad(f, xm);
    for (std::size_t i = 0; i < 3; ++i) {
      const double oracle = (gp[i] - gm[i]) / (2 * step);
      CHECK(std::abs(hf(i, j) - oracle) / std::max(1.0, std::abs(oracle)) <= 1e-4);
    }
  }

  const auto [g2, h2] = ad::gradhessian(f, x);
  CHECK(g2 == ad::grad(f, x));
  CHECK(h2 == hf);
}

TEST_CASE("hessianv examples") {
  const RealMatrix a = symmetric3();
  const Quadratic q{ADMatrix::constant(a)};
  const RealVector x{0.3, -0.7, 1.1}, v{1.0, 2.0, -0.5};
  const RealVector hv = ad::hessianv(q, x, v);
  const RealVector av = a * v;
  for (std::size_t i = 0; i < 3; ++i) CHECK(hv[i] == doctest::Approx(2.0 * av[i]).epsilon(1e-15));
  CHECK(ad::hessianv(q, x, RealVector{0, 0, 0}) == RealVector{0, 0, 0});

  const RealVector x5{0.1, -0.4, 0.8, 1.2, -1.0};
  const RealVector v5{0.5, 0.25, -1.0, 0.3, 0.7};
  const RealVector want = ad::hessian(smooth, x5) * v5;
  CHECK(adtest::maxRelDiff(ad::hessianv(smooth, x5, v5), want) <= 1e-10);

  const auto [gv, hv5] = ad::gradhessianv(smooth, x5, v5);
  CHECK(adtest::relDiff(gv, dotPlain(ad::grad(smooth, x5), v5)) <= 1e-12);
  CHECK(adtest::maxRelDiff(hv5, want) <= 1e-10);
}

TEST_CASE("laplacian examples") {
  for (std::size_t n : {1u, 2u, 5u}) {
    const RealVector x(n, 0.7);
    CHECK(ad::laplacian([](const ADVector& v) { return ad::dot(v, v); }, x) == 2.0 * static_cast<double>(n));
  }
  CHECK(ad::laplacian([](const ADVector& v) { return ad::log(v[0] * v[0] + v[1] * v[1]); }, RealVector{1, 0}) == 0.0);

  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = adtest::Polynomial3::random(rng, 6);
    const RealVector x = adtest::randomVector(rng, 3, -1.5, 1.5);
    const RealMatrix h = ad::hessian(p, x);
    CHECK(adtest::relDiff(ad::laplacian(p, x), h.trace()) <= 1e-10);
  }
}

// ---------------------------------------------------------------------------
// R^n -> R^m

TEST_CASE("jacobian examples") {
  const RealMatrix m(2, 3, {1, 2, 3, -4, 5, 0.5});
  const ADMatrix am = ADMatrix::constant(m);
  CHECK(ad::jacobian([&am](const ADVector& x) { return ad::matVec(am, x); }, RealVector{1, 1, 1}) == m);
  CHECK(ad::jacobian([](const ADVector& x) { return x; }, RealVector{1, 2, 3, 4}) == RealMatrix::identity(4));

  const double r = 2.0, th = std::numbers::pi / 6.0;
  const RealMatrix polar = ad::jacobian(
      [](const ADVector& p) { return ADVector{p[0] * ad::cos(p[1]), p[0] * ad::sin(p[1])}; }, RealVector{r, th});
  CHECK(polar(0, 0) == std::cos(th));
  CHECK(polar(0, 1) == -r * std::sin(th));
  CHECK(polar(1, 0) == std::sin(th));
  CHECK(polar(1, 1) == r * std::cos(th));
}

TEST_CASE("jacobian picks forward mode when n <= m and reverse mode otherwise") {
  int forwardCalls = 0, reverseCalls = 0;
  const auto probe = [&](std::size_t m) {
    return [&, m](const ADVector& x) {
      const auto elems = x.elements();
      if (std::any_of(elems.begin(), elems.end(), [](const ADScalar& e) { return e.isDual(); })) ++forwardCalls;
      if (std::any_of(elems.begin(), elems.end(), [](const ADScalar& e) { return e.isReverse(); })) ++reverseCalls;
      std::vector<ADScalar> out;
      for (std::size_t k = 0; k < m; ++k) out.push_back(ad::sum(x) * (k + 1.0));
      return ADVector(std::move(out));
    };
  };
  (void)ad::jacobian(probe(3), RealVector{1, 2, 3});
  CHECK(forwardCalls == 3);
  CHECK(reverseCalls == 0);
  forwardCalls = 0;
  (void)ad::jacobian(probe(1), RealVector{1, 2, 3});
  CHECK(reverseCalls == 1);
  // The first forward pass discovers m and supplies the returned value.
  CHECK(forwardCalls == 1);
}

TEST_CASE("jacobian rejects functions whose output length depends on the input values") {
  const auto unstable = [](const ADVector& x) {
    std::vector<ADScalar> out{x[0]};
    if (x[1].isDual() || x[1].isReverse()) out.push_back(x[1]);
    return ADVector(std::move(out));
  };
  CHECK_THROWS_AS(ad::jacobianForward(unstable, RealVector{1, 2}), ad::ContractError);
  CHECK_THROWS_AS(ad::jacobian(unstable, RealVector{1, 2, 3}), ad::ContractError);
}

TEST_CASE("jacobianT is the exact transpose of jacobian") {
  for (std::size_t n : {2u, 5u}) {
    const RealVector x = adtest::randomVector(*std::make_unique<std::mt19937_64>(n), n, -1, 1);
    const RealMatrix j = ad::jacobian(smoothField, x);
    CHECK(ad::jacobianT(smoothField, x) == j.transpose());
    const auto [fx, jt] = ad::jacobianTPrime(smoothField, x);
    CHECK(jt == j.transpose());
  }
}

TEST_CASE("jacobianv examples") {
  const RealMatrix m(2, 3, {1, 2, 3, -4, 5, 0.5});
  const ADMatrix am = ADMatrix::constant(m);
  const auto lin = [&am](const ADVector& x) { return ad::matVec(am, x); };
  const RealVector v{0.5, -1, 2};
  CHECK(ad::jacobianv(lin, RealVector{3, 2, 1}, v) == m * v);

  const RealVector x{0.2, -0.3, 0.9};
  const RealMatrix j = ad::jacobian(smoothField, x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ad::jacobianv(smoothField, x, unit(3, i)) == j.col(i));

  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 6, mOut = 1 + (trial / 6) % 6;
    const auto f = adtest::randomField(rng, n, mOut, 4);
    const RealVector xr = adtest::randomVector(rng, n, -1.5, 1.5);
    const RealVector vr = adtest::randomVector(rng, n, -1, 1);
    CAPTURE(f.str());
    CHECK(adtest::maxRelDiff(ad::jacobianv(f, xr, vr), ad::jacobian(f, xr) * vr) <= 1e-12);
  }
}

TEST_CASE("jacobianTv examples") {
  const RealMatrix m(2, 3, {1, 2, 3, -4, 5, 0.5});
  const ADMatrix am = ADMatrix::constant(m);
  const auto lin = [&am](const ADVector& x) { return ad::matVec(am, x); };
  const RealVector w{2, -3};
  CHECK(ad::jacobianTv(lin, RealVector{3, 2, 1}, w) == m.transpose() * w);

  const RealVector x{0.2, -0.3, 0.9};
  const RealMatrix j = ad::jacobian(smoothField, x);
  for (std::size_t r = 0; r < 4; ++r) CHECK(adtest::maxRelDiff(ad::jacobianTv(smoothField, x, unit(4, r)), j.row(r)) <= 1e-12);

  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 6, mOut = 1 + (trial / 6) % 6;
    const auto f = adtest::randomField(rng, n, mOut, 4);
    const RealVector xr = adtest::randomVector(rng, n, -1.5, 1.5);
    const RealVector wr = adtest::randomVector(rng, mOut, -1, 1);
    CAPTURE(f.str());
    CHECK(adtest::maxRelDiff(ad::jacobianTv(f, xr, wr), ad::jacobian(f, xr).transpose() * wr) <= 1e-12);
  }
  CHECK_THROWS_AS(ad::jacobianTv(lin, RealVector{3, 2, 1}, RealVector{1, 2, 3}), ad::ShapeError);
}

TEST_CASE("pullbacks are reusable and never re-evaluate the function") {
  int evaluations = 0;
  const auto f = [&evaluations](const ADVector& x) {
    ++evaluations;
    return smoothField(x);
  };
  const RealVector x{0.2, -0.3, 0.9};
  const auto [fx, pullback] = ad::jacobianTvPrimePrime(f, x);
  CHECK(evaluations == 1);
  CHECK(pullback.inputSize() == 3);
  CHECK(pullback.outputSize() == 4);

  const RealMatrix jt = ad::jacobianT(smoothField, x);
  RealMatrix stacked(3, 4);
  for (std::size_t r = 0; r < 4; ++r) {
    const RealVector col = pullback(unit(4, r));
    for (std::size_t i = 0; i < 3; ++i) stacked(i, r) = col[i];
  }
  CHECK(adtest::maxRelDiff(stacked, jt) <= 1e-12);
  CHECK(pullback(RealVector(4, 0.0)) == RealVector(3, 0.0));
  const RealVector w{0.3, -2, 1, 0.5};
  CHECK(pullback(w) == pullback(w));
  CHECK_THROWS_AS(pullback(RealVector{1, 2}), ad::ShapeError);
  CHECK(evaluations == 1);
  CHECK(fx == smoothField(ADVector::constant(x)).values());
}

TEST_CASE("curl and div examples") {
  const auto rotation = [](const ADVector& p) { return ADVector{-p[1], p[0], ADScalar(0.0)}; };
  const RealVector at{0.3, -1.2, 2.5};
  CHECK(ad::curl(rotation, at) == RealVector{0, 0, 2});
  CHECK(ad::div(rotation, at) == 0.0);
  const auto [c, d] = ad::curldiv(rotation, at);
  CHECK(c == RealVector{0, 0, 2});
  CHECK(d == 0.0);

  const auto identity = [](const ADVector& p) { return p; };
  CHECK(ad::curl(identity, at) == RealVector{0, 0, 0});
  CHECK(ad::div(identity, at) == 3.0);

  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = adtest::Polynomial3::random(rng, 8);
    const auto gradient = [&g](const ADVector& p) { return ad::grad(g, p); };
    const RealVector x = adtest::randomVector(rng, 3, -1.5, 1.5);
    for (double e : ad::curl(gradient, x)) CHECK(std::abs(e) <= 1e-12);
  }
}

TEST_CASE("curl and div reject the wrong dimensions") {
  const auto r2 = [](const ADVector& p) { return ADVector{p[0], p[1]}; };
  const auto r3to2 = [](const ADVector& p) { return ADVector{p[0], p[1] + p[2]}; };
  const auto r4 = [](const ADVector& p) { return p; };
  CHECK_THROWS_AS(ad::curl(r2, RealVector{1, 2}), ad::DimensionError);
  CHECK_THROWS_AS(ad::curl(r3to2, RealVector{1, 2, 3}), ad::DimensionError);
  CHECK_THROWS_AS(ad::curl(r4, RealVector{1, 2, 3, 4}), ad::DimensionError);
  CHECK_THROWS_AS(ad::curldiv(r3to2, RealVector{1, 2, 3}), ad::DimensionError);
  CHECK_THROWS_AS(ad::div(r3to2, RealVector{1, 2, 3}), ad::DimensionError);
  CHECK(ad::div(r2, RealVector{1, 2}) == 2.0);
  CHECK(ad::div(r4, RealVector{1, 2, 3, 4}) == 4.0);
}

TEST_CASE("length errors are raised before the function is evaluated") {
  int evaluations = 0;
  const auto f = [&evaluations](const ADVector& x) {
    ++evaluations;
    return ad::dot(x, x);
  };
  const auto g = [&evaluations](const ADVector& x) {
    ++evaluations;
    return x;
  };
  CHECK_THROWS_AS(ad::gradv(f, RealVector{1, 2}, RealVector{1}), ad::ShapeError);
  CHECK_THROWS_AS(ad::hessianv(f, RealVector{1, 2}, RealVector{1, 2, 3}), ad::ShapeError);
  CHECK_THROWS_AS(ad::gradhessianv(f, RealVector{1, 2}, RealVector{1, 2, 3}), ad::ShapeError);
  CHECK_THROWS_AS(ad::jacobianv(g, RealVector{1, 2}, RealVector{1}), ad::ShapeError);
  CHECK_THROWS_AS(ad::curl(g, RealVector{1, 2}), ad::DimensionError);
  CHECK(evaluations == 0);
}

TEST_CASE("primed variants return the function value from the same evaluation, bitwise") {
  const RealVector x{0.4, -0.8, 1.1};
  const RealVector v{0.3, 0.2, -0.6};
  const double fx = ad::detail::real(smooth(ADVector::constant(x)));
  const RealVector fv = smoothField(ADVector::constant(x)).values();
  const auto scalarFn = [](const ADScalar& t) { return ad::sin(t) * ad::exp(t); };
  const double sx = ad::detail::real(scalarFn(0.7));

  CHECK(adtest::bitwiseEqual(ad::diffPrime(scalarFn, 0.7).first, sx));
  CHECK(adtest::bitwiseEqual(std::get<0>(ad::diff2PrimePrime(scalarFn, 0.7)), sx));
  CHECK(adtest::bitwiseEqual(ad::diff2Prime(scalarFn, 0.7).first, sx));
  CHECK(adtest::bitwiseEqual(ad::diffnPrime(3, scalarFn, 0.7).first, sx));
  CHECK(adtest::bitwiseEqual(ad::gradPrime(smooth, x).first, fx));
  CHECK(adtest::bitwiseEqual(ad::gradvPrime(smooth, x, v).first, fx));
  CHECK(adtest::bitwiseEqual(ad::hessianPrime(smooth, x).first, fx));
  CHECK(adtest::bitwiseEqual(std::get<0>(ad::gradhessianPrime(smooth, x)), fx));
  CHECK(adtest::bitwiseEqual(ad::hessianvPrime(smooth, x, v).first, fx));
  CHECK(adtest::bitwiseEqual(std::get<0>(ad::gradhessianvPrime(smooth, x, v)), fx));
  CHECK(adtest::bitwiseEqual(ad::laplacianPrime(smooth, x).first, fx));
  CHECK(ad::jacobianPrime(smoothField, x).first == fv);
  CHECK(ad::jacobianTPrime(smoothField, x).first == fv);
  CHECK(ad::jacobianvPrime(smoothField, x, v).first == fv);
  CHECK(ad::jacobianTvPrime(smoothField, x, RealVector{1, 0, 2, 0}).first == fv);
  CHECK(ad::jacobianTvPrimePrime(smoothField, x).first == fv);

  const auto field3 = [](const ADVector& p) { return ADVector{p[1] * p[2], ad::sin(p[0]), p[0] * p[1] * p[2]}; };
  const RealVector f3 = field3(ADVector::constant(x)).values();
  CHECK(std::get<0>(ad::curldivPrime(field3, x)) == f3);
  CHECK(ad::curlPrime(field3, x).first == f3);
  CHECK(ad::divPrime(field3, x).first == f3);

  // And the derivative parts agree with the unprimed operations.
  CHECK(ad::gradPrime(smooth, x).second == ad::grad(smooth, x));
  CHECK(ad::hessianPrime(smooth, x).second == ad::hessian(smooth, x));
  CHECK(ad::laplacianPrime(smooth, x).second == ad::laplacian(smooth, x));
  CHECK(std::get<2>(ad::curldivPrime(field3, x)) == ad::div(field3, x));
}

TEST_CASE("second-order composition laws") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const adtest::TreeFunction f{adtest::Expr::random(rng, n, 4)};
    const RealVector x = adtest::randomVector(rng, n, -1.5, 1.5);
    CAPTURE(f.tree->str());
    const RealMatrix h = ad::hessian(f, x);
    CHECK(adtest::maxRelDiff(h, h.transpose()) <= 1e-10);
    CHECK(adtest::relDiff(ad::laplacian(f, x), h.trace()) <= 1e-10);
  }
}

TEST_CASE("grad of a directional derivative matches finite differences") {
  // Reverse over forward with distinct tags: d/dx (grad g(x) . v) = H(x) v.
  const RealVector v{0.6, -0.2, 0.9};
  const auto gv = [&v](const ADVector& x) { return ad::gradv(smooth, x, ADVector::constant(v)); };
  const RealVector x{0.3, 0.5, -0.4};
  const RealVector got = ad::grad(gv, x);
  const double h = 1e-5;
  for (std::size_t i = 0; i < 3; ++i) {
    RealVector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double oracle = (ad::gradv(smooth, xp, v) - ad::gradv(smooth, xm, v)) / (2 * h);
    CHECK(std::abs(got[i] - oracle) / std::max(1.0, std::abs(oracle)) <= 1e-4);
  }
  CHECK(adtest::maxRelDiff(got, ad::hessianv(smooth, x, v)) <= 1e-12);
}

TEST_CASE("lifted operations compose in every nesting order") {
  const RealVector x{0.7, -0.4};
  // grad of grad component: second derivatives by reverse over reverse.
  const auto g0 = [](const ADVector& p) { return ad::grad(smooth, p)[0]; };
  const RealMatrix h = ad::hessian(smooth, x);
  const RealVector row0 = ad::grad(g0, x);
  CHECK(adtest::maxRelDiff(row0, h.row(0)) <= 1e-12);
  // Forward over forward over reverse: third derivative along one axis.
  const auto third = ad::diff(
      [](const ADScalar& t) {
        return ad::diff([](const ADScalar& s) { return ad::grad([](const ADVector& p) { return p[0] * p[0] * p[0] * p[0]; }, ADVector{s})[0]; }, t);
      },
      1.5);
  CHECK(third == 24.0 * 1.5);
  // A Hessian of a function that internally takes a jacobian.
  const auto detJ = [](const ADVector& p) {
    const ADMatrix j = ad::jacobian([](const ADVector& q) { return ADVector{q[0] * q[1], q[0] + ad::sin(q[1])}; }, p);
    return j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  };
  // det J = x1 cos(x1) - x0, so H = [[0, 0], [0, -2 sin(x1) - x1 cos(x1)]].
  const RealMatrix hd = ad::hessian(detJ, x);
  CHECK(hd(0, 0) == 0.0);
  CHECK(hd(0, 1) == 0.0);
  CHECK(adtest::relDiff(hd(1, 1), -2 * std::sin(x[1]) - x[1] * std::cos(x[1])) <= 1e-14);
}

TEST_CASE("hypergradient through five unrolled gradient-descent steps") {
  // Loss L(w) = 0.5 w^T Q w - c^T w on two parameters, trained from w0 with rate eta;
  // d/d eta of the final loss against a central difference with h = 1e-5.
  const RealMatrix q(2, 2, {3.0, 0.5, 0.5, 1.0});
  const RealVector c{1.0, -2.0};
  const RealVector w0{0.5, 0.5};
  const ADMatrix aq = ADMatrix::constant(q);
  const ADVector ac = ADVector::constant(c);
  const auto loss = [&](const ADVector& w) { return 0.5 * ad::dot(w, ad::matVec(aq, w)) - ad::dot(ac, w); };
  const auto trained = [&](const ADScalar& eta) {
    ADVector w = ADVector::constant(w0);
    for (int step = 0; step < 5; ++step) w = w - eta * ad::grad(loss, w);
    return loss(w);
  };
  const double eta = 0.1;
  const double got = ad::diff(trained, eta);
  const double h = 1e-5;
  const double oracle = (ad::detail::real(trained(eta + h)) - ad::detail::real(trained(eta - h))) / (2 * h);
  CHECK(std::abs(got - oracle) / std::abs(oracle) <= 1e-4);
  // Reverse over reverse gives the same hypergradient.
  const RealVector viaGrad = ad::grad([&](const ADVector& e) { return trained(e[0]); }, RealVector{eta});
  CHECK(adtest::relDiff(viaGrad[0], got) <= 1e-12);
}

TEST_CASE("empty inputs are legal") {
  const auto f = [](const ADVector& x) { return ad::sum(x) + 1.0; };
  CHECK(ad::grad(f, RealVector{}).empty());
  CHECK(ad::hessian(f, RealVector{}).rows() == 0);
  CHECK(ad::laplacian(f, RealVector{}) == 0.0);
  const RealMatrix j = ad::jacobian([](const ADVector&) { return ADVector{ADScalar(1.0), ADScalar(2.0)}; }, RealVector{});
  CHECK(j.rows() == 2);
  CHECK(j.cols() == 0);
}

TEST_CASE("concurrent API calls are independent") {
  const RealVector x{0.4, -0.8, 1.1};
  const RealVector g = ad::grad(smooth, x);
  const RealMatrix h = ad::hessian(smooth, x);
  std::vector<std::future<bool>> results;
  for (int t = 0; t < 8; ++t) {
    results.push_back(std::async(std::launch::async, [&] {
      bool same = true;
      for (int k = 0; k < 50; ++k) same = same && ad::grad(smooth, x) == g && ad::hessian(smooth, x) == h;
      return same;
    }));
  }
  for (auto& r : results) CHECK(r.get());
}
