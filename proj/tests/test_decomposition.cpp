#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "intergain/decomposition.hpp"
#include "intergain/rng.hpp"

using namespace intergain;
using testutil::example_3x2;
using testutil::kNaN;
using testutil::matrix_from;

namespace {

GainMatrix from_params(const std::vector<double>& b, const std::vector<double>& t,
                       const std::vector<double>& tp) {
  std::vector<std::vector<double>> cells(b.size(), std::vector<double>(t.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) cells[i][j] = (b[i] + t[j]) * tp[j];
  return matrix_from(cells);
}

GainMatrix random_matrix(std::uint64_t seed, std::size_t rows = 4, std::size_t cols = 4,
                         double noise = 1.0) {
  CounterRng rng(seed);
  std::vector<double> b(rows), t(cols), tp(cols);
  for (double& v : b) v = rng.next_uniform(-3.0, 3.0);
  for (double& v : t) v = rng.next_uniform(-2.0, 2.0);
  for (double& v : tp) v = rng.next_uniform(0.5, 1.5);
  std::vector<std::vector<double>> cells(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      cells[i][j] = (b[i] + t[j]) * tp[j] + noise * rng.next_gaussian();
  return matrix_from(cells);
}

FitConfig fast_config(std::uint64_t seed = 0) {
  FitConfig cfg;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("decomposition") {

TEST_CASE("exact recovery of a representable 2x2 matrix") {
  const GainMatrix g = from_params({1.0, -1.0}, {0.0, 2.0}, {1.0, 2.0});
  const DecompositionModel m = fit_bilinear(g, fast_config());
  CHECK(m.mse <= 1e-6);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(m.predict(i, j) - g.mean_at(i, j)) <= 1e-3);
}

TEST_CASE("constant matrix is represented exactly") {
  const GainMatrix g = matrix_from({{2.5, 2.5}, {2.5, 2.5}});
  const DecompositionModel m = fit_bilinear(g, fast_config());
  CHECK(m.mse <= 1e-12);
  CHECK(m.predict(0, 0) == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("target-only closed form on the 3x2 example") {
  const GainMatrix g = example_3x2();
  const DecompositionModel m = fit_target_only(g);
  CHECK(m.t[0] == doctest::Approx(1.0 / 3.0));
  CHECK(m.t[1] == doctest::Approx(1.0));
  CHECK(m.mse == doctest::Approx(19.0 / 9.0).epsilon(1e-12));
  for (double v : m.b) CHECK(v == 0.0);
  for (double v : m.t_prime) CHECK(v == 1.0);
}

TEST_CASE("base-only closed form on identical rows") {
  // Identical rows: every b_i equal, and the MSE is the variance of the
  // shared row around its own mean.
  const GainMatrix g = matrix_from({{1.0, 3.0, 5.0}, {1.0, 3.0, 5.0}});
  const DecompositionModel m = fit_base_only(g);
  CHECK(m.b[0] == doctest::Approx(m.b[1]));
  const double row_mean = 3.0;
  const double row_var = ((1 - row_mean) * (1 - row_mean) + 0.0 + (5 - row_mean) * (5 - row_mean)) / 3.0;
  CHECK(m.mse == doctest::Approx(row_var).epsilon(1e-12));
  CHECK(m.predict(0, 0) == doctest::Approx(row_mean));
}

TEST_CASE("zero matrix fits with zero error in every variant") {
  const GainMatrix g = matrix_from({{0.0, 0.0}, {0.0, 0.0}});
  CHECK(fit_base_only(g).mse == doctest::Approx(0.0));
  CHECK(fit_target_only(g).mse == doctest::Approx(0.0));
  CHECK(fit_bilinear(g, fast_config()).mse <= 1e-12);
}

TEST_CASE("closed-form fits match a scan-based least-squares oracle on 3x3") {
  // Oracle: per row (or column), minimize sum (g - c)^2 by ternary search,
  // independent of the mean formula used by the implementation.
  const auto scan_minimum = [](const std::vector<double>& vals) {
    double lo = -50.0, hi = 50.0;
    const auto sse = [&vals](double c) {
      double s = 0.0;
      for (double v : vals) s += (v - c) * (v - c);
      return s;
    };
    for (int iter = 0; iter < 200; ++iter) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (sse(m1) < sse(m2)) hi = m2;
      else lo = m1;
    }
    return (lo + hi) / 2.0;
  };

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GainMatrix g = random_matrix(seed, 3, 3, 2.0);
    const DecompositionModel base = fit_base_only(g);
    const DecompositionModel tgt = fit_target_only(g);
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> row;
      for (std::size_t j = 0; j < 3; ++j) row.push_back(g.mean_at(i, j));
      CHECK(base.predict(i, 0) == doctest::Approx(scan_minimum(row)).epsilon(1e-9));
    }
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> col;
      for (std::size_t i = 0; i < 3; ++i) col.push_back(g.mean_at(i, j));
      CHECK(tgt.predict(0, j) == doctest::Approx(scan_minimum(col)).epsilon(1e-9));
    }
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    GainMatrix g = random_matrix(seed, 3, 4, 1.5);
    if (seed % 2 == 1) g.n_seeds[g.idx(1, 2)] = 0;  // with a missing cell too
    CounterRng rng(seed + 1000);
    std::vector<double> b(3), t(4), tp(4);
    for (double& v : b) v = rng.next_uniform(-2.0, 2.0);
    for (double& v : t) v = rng.next_uniform(-2.0, 2.0);
    for (double& v : tp) v = rng.next_uniform(0.3, 2.0);

    std::vector<double> gb, gt, gtp;
    bilinear_gradient(g, b, t, tp, gb, gt, gtp);

    const double h = 1e-5;
    const auto check_dim = [&](std::vector<double>& param, std::size_t k, double analytic) {
      const double saved = param[k];
      param[k] = saved + h;
      const double up = bilinear_mse(g, b, t, tp);
      param[k] = saved - h;
      const double down = bilinear_mse(g, b, t, tp);
      param[k] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max(1e-8, std::abs(fd));
      CHECK(std::abs(analytic - fd) / denom < 1e-4);
    };
    for (std::size_t k = 0; k < b.size(); ++k) check_dim(b, k, gb[k]);
    for (std::size_t k = 0; k < t.size(); ++k) check_dim(t, k, gt[k]);
    for (std::size_t k = 0; k < tp.size(); ++k) check_dim(tp, k, gtp[k]);
  }
}

TEST_CASE("gauge transforms leave predictions unchanged and canonicalization is stable") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed);
    DecompositionModel m;
    m.model_ids = {"a", "b", "c"};
    m.target_ids = {"x", "y"};
    m.b = {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    m.t = {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    m.t_prime = {rng.next_uniform(0.2, 2), rng.next_uniform(0.2, 2)};

    // shift gauge: b+c, t-c
    DecompositionModel shifted = m;
    const double c = rng.next_uniform(-3, 3);
    for (double& v : shifted.b) v += c;
    for (double& v : shifted.t) v -= c;
    // scale gauge: a*b, a*t, t'/a
    DecompositionModel scaled = m;
    const double a = rng.next_uniform(0.3, 3.0);
    for (double& v : scaled.b) v *= a;
    for (double& v : scaled.t) v *= a;
    for (double& v : scaled.t_prime) v /= a;

    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(shifted.predict(i, j) == doctest::Approx(m.predict(i, j)).epsilon(1e-12));
        CHECK(scaled.predict(i, j) == doctest::Approx(m.predict(i, j)).epsilon(1e-12));
      }

    // canonicalizing any gauge representative gives the same parameters
    DecompositionModel canon1 = m, canon2 = shifted, canon3 = scaled;
    canonicalize(canon1);
    canonicalize(canon2);
    canonicalize(canon3);
    CHECK(mean_of(canon1.b) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mean_of(canon1.t_prime) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(canon2.b[k] == doctest::Approx(canon1.b[k]).epsilon(1e-9));
      CHECK(canon3.b[k] == doctest::Approx(canon1.b[k]).epsilon(1e-9));
    }
    // predictions bit-stable to 1e-9 under canonicalization
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(canon1.predict(i, j) - m.predict(i, j)) <= 1e-9);
  }
}

TEST_CASE("bilinear fit never loses to the restricted fits") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GainMatrix g = random_matrix(seed, 4, 4, 2.0);
    const double full = fit_bilinear(g, fast_config(seed)).mse;
    CHECK(full <= fit_base_only(g).mse + 1e-6);
    CHECK(full <= fit_target_only(g).mse + 1e-6);
  }
}

TEST_CASE("missing cells are excluded from the loss") {
  GainMatrix g = from_params({1.0, -1.0, 0.5}, {0.0, 2.0, 1.0}, {1.0, 2.0, 0.8});
  g.n_seeds[g.idx(0, 1)] = 0;
  g.mean[g.idx(0, 1)] = kNaN;
  const DecompositionModel m = fit_bilinear(g, fast_config());
  CHECK(m.mse <= 1e-6);  // remaining cells are still exactly representable
}

TEST_CASE("iteration budget exhaustion is flagged, not thrown") {
  const GainMatrix g = random_matrix(3, 5, 5, 2.0);
  FitConfig cfg = fast_config();
  cfg.max_iterations = 3;
  const DecompositionModel m = fit_bilinear(g, cfg);
  CHECK_FALSE(m.converged);
}

TEST_CASE("degenerate matrices are rejected") {
  CHECK_THROWS_AS(fit_bilinear(matrix_from({{1.0, 2.0}}), fast_config()), DegenerateError);
  GainMatrix g = matrix_from({{1.0, kNaN}, {2.0, kNaN}});
  CHECK_THROWS_AS(fit_bilinear(g, fast_config()), DegenerateError);
}

TEST_CASE("shuffled baseline comparison") {
  SUBCASE("constant matrix: shuffling is the identity") {
    const GainMatrix g = matrix_from({{1.0, 1.0}, {1.0, 1.0}});
    const BaselineComparison cmp = shuffled_baseline(g, FitKind::target_only, 5, 3);
    CHECK(cmp.fitted_mse == doctest::Approx(0.0));
    CHECK(cmp.shuffled_mse_mean == doctest::Approx(0.0));
    CHECK(cmp.shuffled_mse_std == doctest::Approx(0.0));
  }
  SUBCASE("structured matrix separates from its shuffles") {
    CounterRng rng(77);
    const GainMatrix g = random_matrix(77, 8, 8, 0.2);
    const BaselineComparison cmp = shuffled_baseline(g, FitKind::bilinear, 10, 5, fast_config(5));
    CHECK(cmp.fitted_mse < cmp.shuffled_mse_mean - 2.0 * cmp.shuffled_mse_std);
  }
  SUBCASE("deterministic per seed and thread count") {
    const GainMatrix g = random_matrix(9, 5, 5, 1.0);
    FitConfig one = fast_config(1);
    FitConfig four = fast_config(1);
    four.threads = 4;
    const BaselineComparison a = shuffled_baseline(g, FitKind::bilinear, 6, 11, one);
    const BaselineComparison b = shuffled_baseline(g, FitKind::bilinear, 6, 11, four);
    CHECK(a.fitted_mse == b.fitted_mse);
    CHECK(a.shuffled_mse_mean == b.shuffled_mse_mean);
    CHECK(a.shuffled_mse_std == b.shuffled_mse_std);
  }
  SUBCASE("fewer than 2 shuffles is an error") {
    const GainMatrix g = random_matrix(1, 3, 3, 1.0);
    CHECK_THROWS_AS(shuffled_baseline(g, FitKind::bilinear, 1, 0), Error);
  }
}

}  // TEST_SUITE
