#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "intergain/decomposition.hpp"
#include "intergain/ranking.hpp"
#include "intergain/stats.hpp"
#include "intergain/synth.hpp"

using namespace intergain;

namespace {

GeneratorSpec small_spec(std::uint64_t seed, double noise = 0.0) {
  GeneratorSpec s;
  s.n_models = 6;
  s.n_targets = 5;
  s.n_seeds = 3;
  s.noise_std = noise;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("noiseless generation reproduces the decomposition surface exactly") {
  const GeneratedTable gen = generate(small_spec(4));
  const GainMatrix g = compute_gains(gen.table);
  REQUIRE(g.model_ids == gen.truth.model_ids);
  REQUIRE(g.target_ids == gen.truth.target_ids);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      CHECK(g.mean_at(i, j) == doctest::Approx(gen.truth.predict(i, j)).epsilon(1e-9));
  CHECK(gen.clamped_scores == 0);
}

TEST_CASE("ground truth comes out in canonical gauge") {
  const GeneratedTable gen = generate(small_spec(9));
  CHECK(mean_of(gen.truth.b) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mean_of(gen.truth.t_prime) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("same seed gives identical tables, different seed differs") {
  const GeneratedTable a = generate(small_spec(11, 0.5));
  const GeneratedTable b = generate(small_spec(11, 0.5));
  CHECK(a.table == b.table);
  const GeneratedTable c = generate(small_spec(12, 0.5));
  CHECK(a.table != c.table);
}

TEST_CASE("end-to-end recovery on a noiseless table") {
  const GeneratedTable gen = generate(small_spec(21));
  const GainMatrix g = compute_gains(gen.table);
  FitConfig cfg;
  cfg.seed = 21;
  const DecompositionModel m = fit_bilinear(g, cfg);
  CHECK(m.mse <= 1e-6);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      CHECK(std::abs(m.predict(i, j) - gen.truth.predict(i, j)) <= 1e-3);
}

TEST_CASE("fitted error grows with the noise level") {
  const std::vector<double> noise_levels{0.0, 0.25, 0.5, 1.0, 2.0};
  std::vector<double> avg_mse;
  for (double noise : noise_levels) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const GeneratedTable gen = generate(small_spec(100 + seed, noise));
      FitConfig cfg;
      cfg.seed = seed;
      cfg.restarts = 3;
      total += fit_bilinear(compute_gains(gen.table), cfg).mse;
    }
    avg_mse.push_back(total / 4.0);
  }
  const std::vector<double> levels_copy(noise_levels);
  const CorrelationResult rho = spearman(levels_copy, avg_mse, PermutationConfig{0, 0, 1});
  CHECK(rho.coefficient > 0.0);
  CHECK(avg_mse.front() < avg_mse.back());
}

TEST_CASE("ranking by true quality matches rank-by-average on noiseless tables") {
  for (std::uint64_t seed = 30; seed < 36; ++seed) {
    const GeneratedTable gen = generate(small_spec(seed));
    const GainMatrix g = compute_gains(gen.table);
    // t' is positive by construction here, so sorting by b must agree
    std::vector<QualityScore> truth_scores;
    for (std::size_t i = 0; i < gen.truth.b.size(); ++i)
      truth_scores.push_back({gen.truth.model_ids[i], gen.truth.b[i], QualityKind::custom});
    CHECK(rank_models(truth_scores) == rank_models(rank_by_average(g)));
  }
}

TEST_CASE("clamping is counted and an all-clamped spec is an error") {
  GeneratorSpec spec = small_spec(40, 0.0);
  spec.baseline_level = 99.5;
  spec.b_range = {3.0, 4.0};
  spec.t_range = {1.0, 2.0};
  spec.t_prime_range = {1.0, 1.5};
  // signal is at least (3+1)*1 = 4 above 99.5: everything clamps
  CHECK_THROWS_WITH_AS(generate(spec), doctest::Contains("clamped"), Error);

  spec.baseline_level = 98.0;
  spec.b_range = {-6.0, 4.0};
  const GeneratedTable gen = generate(spec);
  CHECK(gen.clamped_scores > 0);
  for (const auto& r : gen.table.records) {
    CHECK(r.score >= 0.0);
    CHECK(r.score <= 100.0);
  }
}

TEST_CASE("invalid specs are rejected") {
  GeneratorSpec bad = small_spec(1);
  bad.n_models = 0;
  CHECK_THROWS_AS(generate(bad), Error);
  bad = small_spec(1);
  bad.noise_std = -1.0;
  CHECK_THROWS_AS(generate(bad), Error);
  bad = small_spec(1);
  bad.b_range = {2.0, 1.0};
  CHECK_THROWS_AS(generate(bad), Error);
  bad = small_spec(1);
  bad.square_ids = true;  // 6 models vs 5 targets
  CHECK_THROWS_AS(generate(bad), Error);
}

TEST_CASE("square id mode shares one id set") {
  GeneratorSpec spec = small_spec(2);
  spec.n_targets = 6;
  spec.square_ids = true;
  const GeneratedTable gen = generate(spec);
  const GainMatrix g = compute_gains(gen.table);
  CHECK(g.model_ids == g.target_ids);
}

}  // TEST_SUITE
