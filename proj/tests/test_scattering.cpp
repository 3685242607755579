#include <cmath>
#include <vector>

#include "doctest.h"
#include "pnls/diagnostics.hpp"
#include "pnls/errors.hpp"
#include "pnls/propagators.hpp"
#include "pnls/scattering.hpp"
#include "pnls/solver.hpp"
#include "test_support.hpp"

using namespace pnls;
using namespace pnls::testing;

namespace {

HermiteGaussian packet(double amplitude, double free_width = 2.0) {
  HermiteGaussian h;
  h.width = {1.0, free_width};
  h.amplitude = amplitude;
  return h;
}

Probes snapshot_probes(std::vector<double> times) {
  Probes p;
  p.sigma = p.vector_fields = p.morawetz = false;
  p.snapshot_times = std::move(times);
  return p;
}

Trajectory cell_run(const GridPtr& grid, double amplitude, double lambda, double sigma, double t1,
                    std::vector<double> snapshots, double dt = 0.05) {
  SimParams p;
  p.lambda = lambda;
  p.sigma = sigma;
  p.dt = dt;
  p.t1 = t1;
  p.sample_stride = static_cast<int>(std::lround(1.0 / dt));
  return run_simulation(sample(grid, packet(amplitude)), p, snapshot_probes(std::move(snapshots)));
}

}  // namespace

TEST_CASE("interaction profile undoes the linear flow and preserves the norm") {
  const auto grid = small_grid(2, 1, 24, 24.0, 128);
  std::mt19937_64 rng(7);
  const Field u0 = random_localized_field(grid, rng);
  for (double t : {0.7, 3.0, 11.5}) {
    const Field ut = linear_propagate(u0, t);
    const Field v = interaction_profile(ut, t);
    CHECK(rel_diff(v, u0) < 1e-10);
    CHECK(std::abs(norm(v) - norm(ut)) < 1e-12 * norm(ut));
  }
}

TEST_CASE("verdict classifier") {
  const VerdictThresholds th;
  CHECK(classify({0.0, 0.0, 0.0}, 1.0, th) == Verdict::converging);
  CHECK(classify({1.0, 0.3, 0.1}, 1.0, th) == Verdict::converging);
  CHECK(classify({1.0, 0.8, 0.7}, 1.0, th) == Verdict::plateau);
  CHECK(classify({1.0, 0.3, 0.31}, 1.0, th) == Verdict::plateau);
  CHECK(classify({1.0, 1.5, 2.2}, 1.0, th) == Verdict::diverging);
  CHECK(classify({1.0, 0.6, 0.4}, 1.0, VerdictThresholds{0.7, 1.1}) == Verdict::converging);
  CHECK(to_string(Verdict::plateau) == "plateau");
}

TEST_CASE("linear trajectory: every profile difference vanishes") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 40.0, 256});
  const Trajectory traj = cell_run(grid, 1.0, 0.0, 3.0, 8.0, {1, 2, 4, 8}, 0.05);
  const ScatteringReport rep = scattering_monitor(traj, {1, 2, 4, 8});
  REQUIRE(rep.diff_sigma.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rep.diff_l2[i] < 1e-12);
    CHECK(rep.diff_sigma[i] < 1e-11);
    CHECK(rep.diff_vf[i] < 1e-11);
  }
  CHECK(rep.verdict == Verdict::converging);
}

TEST_CASE("monitor rejects a horizon without the requested snapshots") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 40.0, 256});
  const Trajectory traj = cell_run(grid, 1.0, 0.0, 3.0, 4.0, {1, 2, 4});
  CHECK_THROWS_AS(scattering_monitor(traj, {1, 2, 4, 8}), InsufficientSamples);
  CHECK_THROWS_AS(scattering_monitor(traj, {1, 2}), InsufficientSamples);
}

TEST_CASE("weak nonlinearity: the profile deviation is linear in lambda") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 40.0, 256});
  const Field u0 = sample(grid, packet(1.0));
  std::vector<double> dev;
  for (double lambda : {1e-2, 5e-3}) {
    const Trajectory traj = cell_run(grid, 1.0, lambda, 1.0, 5.0, {5.0});
    dev.push_back(norm(interaction_profile(traj.snapshot_at(5.0), 5.0) - u0));
  }
  CHECK(dev[1] / dev[0] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("short-range cell converges, long-range cell does not") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 160.0, 768});
  const std::vector<double> times{10, 20, 40, 80};
  const ScatteringReport short_range = scattering_monitor(cell_run(grid, 1.0, 1.0, 3.0, 80.0, times), times);
  REQUIRE(short_range.ratios.size() == 2);
  CHECK(short_range.ratios[0] < 0.5);
  CHECK(short_range.ratios[1] < 0.5);
  CHECK(short_range.verdict == Verdict::converging);
  CHECK(short_range.u_plus_error == short_range.diff_sigma.back());
  // Sigma and vector-field differences are equivalent norms.
  for (std::size_t i = 0; i < 3; ++i) {
    const double q = short_range.diff_vf[i] / short_range.diff_sigma[i];
    CHECK(q > 0.5);
    CHECK(q < 5.0);
  }

  const ScatteringReport long_range = scattering_monitor(cell_run(grid, 1.0, 1.0, 0.5, 80.0, times), times);
  CHECK(long_range.verdict != Verdict::converging);
  CHECK(long_range.diff_sigma[1] > 10.0 * short_range.diff_sigma[1]);
}

TEST_CASE("wave operator: lambda = 0 is fixed after one sweep") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 64.0, 256});
  const Field um = sample(grid, packet(1.0));
  SimParams p;
  p.lambda = 0.0;
  p.sigma = 3.0;
  WaveOperatorOptions o;
  o.T = 10.0;
  o.window = 2.0;
  const ScatteringReport rep = wave_operator_picard(um, p, o);
  CHECK(rep.iterations == 1);
  CHECK(rep.picard_increments[0] == 0.0);
  CHECK(rep.round_trip_mismatch < 1e-10);
  CHECK(rel_diff(rep.u_plus, um) < 1e-12);
}

TEST_CASE("wave operator: short range contracts, long range does not") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 110.0, 512});
  const Field um = sample(grid, packet(1.0));
  SimParams p;
  p.lambda = 1.0;
  p.sigma = 3.0;
  WaveOperatorOptions o;
  o.T = 20.0;
  o.window = 10.0;
  const ScatteringReport rep = wave_operator_picard(um, p, o);
  REQUIRE(!rep.contraction_factors.empty());
  for (double f : rep.contraction_factors) CHECK(f <= 0.5);
  CHECK(rep.duhamel_residual < 1e-10);
  CHECK(rep.round_trip_mismatch < 0.05);
  CHECK(rep.solver_mismatch < 1e-5);

  p.sigma = 0.5;
  CHECK_THROWS_AS(wave_operator_picard(um, p, o), NoContraction);
}

TEST_CASE("wave operator rejects unresolved windows") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 40.0, 128});
  const Field um = sample(grid, packet(0.5));
  SimParams p;
  p.lambda = 1.0;
  WaveOperatorOptions o;
  o.T = 10.0;
  o.window = 0.07;
  CHECK_THROWS_AS(wave_operator_picard(um, p, o), QuadratureResolution);
  o.window = 12.0;
  CHECK_THROWS_AS(wave_operator_picard(um, p, o), InvalidArgument);
}

TEST_CASE("long-range probe: phase drift and its sign") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 80.0, 384});
  const Field u0 = sample(grid, packet(0.3));
  std::vector<double> times;
  for (double t = 2.0; t <= 32.0; t *= std::sqrt(2.0)) times.push_back(std::round(t * 20.0) / 20.0);
  auto probe = [&](double lambda) {
    return long_range_probe(cell_run(grid, 0.3, lambda, 1.0, 32.0, times), u0);
  };
  const ScatteringReport free = probe(0.0);
  for (double th : free.phase) CHECK(std::abs(th) < 1e-12);
  CHECK(std::abs(free.log_coefficient) < 1e-12);

  const ScatteringReport plus = probe(1.0);
  const ScatteringReport minus = probe(-1.0);
  CHECK(plus.log_coefficient < 0.0);
  CHECK(minus.log_coefficient > 0.0);
  CHECK(plus.log_coefficient == doctest::Approx(-minus.log_coefficient).epsilon(0.05));
  CHECK(plus.log_residual < 0.1 * std::abs(plus.log_coefficient) * std::log(16.0));
}

TEST_CASE("long-range probe rejects an orthogonal reference") {
  const auto grid = Grid::make(GridSpec{2, 1, 16, 40.0, 256});
  HermiteGaussian odd = packet(1.0);
  odd.order = {1, 0};
  const Trajectory traj = cell_run(grid, 1.0, 1.0, 1.0, 4.0, {1, 2, 3, 4});
  CHECK_THROWS_AS(long_range_probe(traj, sample(grid, odd)), VanishingOverlap);
}
