#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "coxgp/error.hpp"
#include "coxgp/geometry.hpp"
#include "coxgp/linalg.hpp"
#include "coxgp/parallel.hpp"
#include "coxgp/random_field.hpp"
#include "coxgp/rng.hpp"
#include "oracles.hpp"

using namespace coxgp;

TEST_CASE("derived seeds are deterministic and distinct") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("rng gamma uses the rate parametrization") {
  Rng rng(11);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.gamma(3.0, 2.0);
  CHECK(std::abs(s / n - 1.5) < 4.0 * std::sqrt(3.0 / 4.0 / n));
  double sb = 0.0;
  for (int i = 0; i < n; ++i) sb += rng.beta(2.0, 2.0);
  CHECK(std::abs(sb / n - 0.5) < 4.0 * std::sqrt(0.05 / n));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform_open();
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("pairwise sum matches naive summation and is shape-stable") {
  std::vector<double> v(1001);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(1001.0 * 1002.0 / 2.0));
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
  CHECK(pairwise_sum(v.data(), 1) == 1.0);
}

TEST_CASE("thread pool visits every index once and propagates errors") {
  for (std::size_t threads : {1u, 3u}) {
    ThreadPool pool(threads);
    std::vector<int> hits(257, 0);
    pool.parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS(pool.parallel_for(10, [](std::size_t i) {
      if (i == 7) throw Error("boom");
    }));
    std::atomic<int> after{0};
    pool.parallel_for(5, [&](std::size_t) { ++after; });
    CHECK(after == 5);
  }
}

TEST_CASE("jittered cholesky reconstructs and escalates") {
  Eigen::MatrixXd a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  const auto f = jittered_cholesky(a);
  const Eigen::MatrixXd r = f.lower * f.lower.transpose();
  CHECK((r - a).norm() / a.norm() < 1e-8);
  CHECK(f.jitter == doctest::Approx(2e-10));
  CHECK(f.log_det == doctest::Approx(std::log(1.75)).epsilon(1e-8));
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  CHECK(inverse_quadratic_form(f, x) == doctest::Approx(x.dot(a.inverse() * x)).epsilon(1e-8));

  // Slightly indefinite: needs more than the first jitter level.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3) - 3e-9 * Eigen::MatrixXd::Identity(3, 3);
  const auto g = jittered_cholesky(ones);
  CHECK(g.jitter > 3e-9);
  CHECK(g.jitter <= 1e-4 * 3.0);
  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(jittered_cholesky(neg), FactorizationError);
  CholeskyFactor out;
  CHECK_FALSE(try_jittered_cholesky(neg, out));
}

TEST_CASE("window contracts") {
  const auto w = Window::centered_unit_square();
  CHECK(w.volume() == 1.0);
  CHECK(w.contains(std::vector<double>{0.5, -0.5}));
  CHECK_FALSE(w.contains(std::vector<double>{0.51, 0.0}));
  CHECK_THROWS_AS(Window({0.0}, {0.0}), Error);
  CHECK_THROWS_AS(Window({0.0, 1.0}, {1.0}), Error);
  CHECK_THROWS_AS(Window({}, {}), Error);
}

TEST_CASE("quadrature examples") {
  const auto q = build_quadrature(Window::centered_unit_square(), 50);
  CHECK(q.size() == 2500);
  for (double w : q.weights) CHECK(w == doctest::Approx(4e-4).epsilon(1e-14));
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(q.window.contains(q.node(i)));
  CHECK(integrate(q, [](std::span<const double>) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(integrate(q, [](std::span<const double> x) { return x[0]; })) < 1e-12);
  CHECK(std::abs(integrate(q, [](std::span<const double> x) { return 3.0 + 2.0 * x[0] - x[1]; }) - 3.0) < 1e-12);

  const auto one = build_quadrature(Window({0.0}, {1.0}), 1);
  CHECK(one.size() == 1);
  CHECK(one.node(0)[0] == 0.5);
  CHECK(one.weights[0] == 1.0);

  const auto rect = build_quadrature(Window({0.0, 0.0}, {2.0, 1.0}), 2);
  CHECK(rect.size() == 4);
  for (double w : rect.weights) CHECK(w == 0.5);

  const auto unit = build_quadrature(Window({0.0}, {1.0}), 10);
  CHECK(integrate(unit, [](std::span<const double> x) { return x[0] * x[0]; }) == doctest::Approx(0.3325));

  CHECK_THROWS_AS(build_quadrature(Window({0.0}, {1.0}), 0), Error);
  CHECK_THROWS_AS(integrate(unit, [](std::span<const double>) { return std::nan(""); }), Error);
}

TEST_CASE("evaluation grid layout") {
  EvalGrid g(2, 3);
  CHECK(g.size() == 9);
  CHECK(g.point(1) == std::vector<double>{0.0, 0.5});
  CHECK(g.point(3) == std::vector<double>{0.5, 0.0});
  CHECK(EvalGrid::defaults(1).size() == 400);
  CHECK(EvalGrid::defaults(2).size() == 3600);
  CHECK_THROWS_AS(EvalGrid(1, 1), Error);
}

namespace {

void check_basis_properties(const InterpolationBasis& basis, std::uint64_t seed) {
  const std::size_t d = basis.dim();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> z(d);
  std::vector<double> affine(basis.size());
  for (std::size_t v = 0; v < basis.size(); ++v) {
    double a = 0.3;
    for (std::size_t j = 0; j < d; ++j) a += (1.0 + static_cast<double>(j)) * basis.node(v)[j];
    affine[v] = a;
  }
  double worst_unity = 0.0;
  double worst_affine = 0.0;
  for (int t = 0; t < 10000; ++t) {
    for (auto& c : z) c = unif(gen);
    const Stencil s = basis.stencil(z);
    double total = 0.0;
    for (std::size_t k = 0; k < s.size; ++k) {
      CHECK(s.weight[k] >= -1e-15);
      total += s.weight[k];
    }
    worst_unity = std::max(worst_unity, std::abs(total - 1.0));
    double expect = 0.3;
    for (std::size_t j = 0; j < d; ++j) expect += (1.0 + static_cast<double>(j)) * z[j];
    worst_affine = std::max(worst_affine, std::abs(basis.evaluate(affine, z) - expect));
  }
  CHECK(worst_unity < 1e-12);
  CHECK(worst_affine < 1e-10);
  for (std::size_t v = 0; v < basis.size(); v += std::max<std::size_t>(1, basis.size() / 17)) {
    for (std::size_t u = 0; u < basis.size(); u += std::max<std::size_t>(1, basis.size() / 13)) {
      CHECK(basis.basis_function(u, basis.node(v)) == doctest::Approx(u == v ? 1.0 : 0.0));
    }
  }
}

}  // namespace

TEST_CASE("basis construction examples") {
  const auto b1 = build_basis({1, 200, 0.0});
  CHECK(b1.size() == 200);
  CHECK(b1.node(1)[0] == doctest::Approx(1.0 / 199.0));
  const auto b2 = build_basis({2, 0, 0.0014});
  CHECK(b2.element_measure() <= 0.0014);
  CHECK(std::abs(static_cast<double>(b2.size()) - 600.0) <= 60.0);
  const auto two = build_basis({1, 2, 0.0});
  CHECK(two.basis_function(0, std::vector<double>{0.3}) == doctest::Approx(0.7));
  CHECK(two.basis_function(1, std::vector<double>{0.3}) == doctest::Approx(0.3));
  const std::vector<double> c01{0.0, 1.0};
  CHECK(evaluate_interpolant(two, c01, std::vector<double>{0.25}) == doctest::Approx(0.25));
  const std::vector<double> consts(b2.size(), 2.5);
  CHECK(b2.evaluate(consts, std::vector<double>{0.31, 0.77}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(b1.stencil(std::vector<double>{1.2}), Error);
  CHECK_THROWS_AS(build_basis({4, 3, 0.0}), Error);
  CHECK_THROWS_AS(build_basis({2, 0, 0.0}), Error);
}

TEST_CASE("basis properties for every kind") {
  check_basis_properties(build_basis({1, 37, 0.0}), 1);
  check_basis_properties(build_basis({2, 9, 0.0}), 2);
  check_basis_properties(build_basis({3, 5, 0.0}), 3);
}

TEST_CASE("se field sampler") {
  const auto w = Window::centered_unit_square();
  const auto a = sample_se_field(w, 11, 0.05, 3);
  const auto b = sample_se_field(w, 11, 0.05, 3);
  CHECK(a.values == b.values);
  CHECK(a.values != sample_se_field(w, 11, 0.05, 4).values);

  const auto flat = sample_se_field(w, 11, 1e6, 9);
  CHECK(oracle::variance(flat.values) < 0.01);

  SeFieldSampler sampler(FieldGrid::uniform(w, 6), 0.05);
  const auto& g = sampler.gram();
  CHECK(g.isApprox(g.transpose(), 0.0));
  CHECK(g.diagonal().isOnes());
  Rng rng(21);
  std::vector<double> at;
  for (int i = 0; i < 10000; ++i) at.push_back(sampler.sample(rng)[7]);
  CHECK(std::abs(oracle::mean(at)) < 0.03);
  CHECK(std::abs(oracle::variance(at) - 1.0) < 0.05);

  // The Phi-transformed marginal is uniform.
  std::vector<double> u;
  for (double x : at) u.push_back(normal_cdf(x));
  CHECK(oracle::ks_statistic(u, [](double x) { return x; }) < 1.63 / std::sqrt(10000.0));
}

TEST_CASE("gaussianize and field evaluation") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_cdf(-40.0) > 0.0);
  CHECK(normal_cdf(40.0) < 1.0);
  CHECK(normal_cdf(-0.1) < normal_cdf(0.1));

  FieldGrid grid(Window({0.0, 0.0}, {1.0, 1.0}), {2, 2});
  RawField raw{grid, 1, {0.0, 1.959964, -1.0, 0.5}};
  const auto f = gaussianize(raw);
  CHECK(f.value_at(0)[0] == 0.5);
  for (double v : f.values()) CHECK((v > 0.0 && v < 1.0));

  CovariateField lin(grid, 1, {0.2, 0.2, 0.6, 0.6});
  CHECK(lin.evaluate(std::vector<double>{0.5, 0.3})[0] == doctest::Approx(0.4));
  CHECK(lin.evaluate(std::vector<double>{1.0, 1.0})[0] == 0.6);
  CHECK_THROWS_AS(lin.evaluate(std::vector<double>{1.2, 0.0}), Error);
  CHECK_THROWS_AS(CovariateField(grid, 1, {0.2, 1.2, 0.0, 0.0}), Error);

  const auto big = sample_se_field(Window::centered_unit_square(), 21, 0.005, 5);
  const auto g2 = gaussianize(big);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{unif(gen), unif(gen)};
    CHECK(g2.evaluate(x)[0] == doctest::Approx(oracle::field_value(g2, x)[0]).epsilon(1e-12));
  }
}

TEST_CASE("preprocessing modes") {
  FieldGrid grid(Window({0.0, 0.0}, {1.0, 1.0}), {2, 2});
  std::vector<RawField> raw{{grid, 1, {1.0, 2.0, 3.0, 4.0}}, {grid, 1, {5.0, 6.0, 7.0, 8.0}}};
  const auto emp = preprocess_fields(raw, Preprocess::EmpiricalCdf);
  CHECK(emp[0].value_at(0)[0] == doctest::Approx(1.0 / 9.0));
  CHECK(emp[1].value_at(3)[0] == doctest::Approx(8.0 / 9.0));
  const auto std_cdf = preprocess_fields(raw, Preprocess::StandardizedNormalCdf);
  CHECK(std_cdf[0].value_at(0)[0] < 0.5);
  CHECK(std_cdf[1].value_at(3)[0] > 0.5);
  CHECK_THROWS_AS(preprocess_fields(raw, Preprocess::None), Error);
}
