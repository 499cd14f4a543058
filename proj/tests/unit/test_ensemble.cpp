#include <cmath>
#include <vector>

#include "doctest.h"

#include "cbjj/ensemble.hpp"
#include "cbjj/error.hpp"

using namespace cbjj;

namespace {

EnsembleConfig cheap_config(double i_b, std::int64_t n_runs)
{
    EnsembleConfig c;
    c.scenario.junction = {8.586e-6, 29.0, 2700e-15};
    c.scenario.op = {i_b, 0.05};
    c.scenario.sim.tau_max = 20.0;
    c.scenario.sim.dt = 1e-3;
    c.n_runs = n_runs;
    c.master_seed = 17;
    return c;
}

}  // namespace

TEST_CASE("summary statistics of known outcomes")
{
    const std::vector<SwitchOutcome> outcomes = {{1.0}, {}, {2.0}, {4.0}, {}};
    const SwitchStats s = summarize(outcomes);
    CHECK(s.n_runs == 5);
    CHECK(s.n_switched == 3);
    CHECK(s.n_censored == 2);
    CHECK(s.times == std::vector<double>{1.0, 2.0, 4.0});
    REQUIRE(s.mean_gamma);
    CHECK(*s.mean_gamma == doctest::Approx(7.0 / 3.0));
    // sum of squared deviations 14/3, divided by N(N-1) = 6
    CHECK(*s.sem_sq_gamma == doctest::Approx(14.0 / 18.0));
    CHECK(s.switched_fraction() == doctest::Approx(0.6));
    CHECK(s.censored_fraction() == doctest::Approx(0.4));

    const SwitchStats one = summarize(std::vector<SwitchOutcome>{{3.0}, {}});
    CHECK(one.mean_gamma == 3.0);
    CHECK_FALSE(one.sem_sq_gamma);
    const SwitchStats none = summarize(std::vector<SwitchOutcome>{{}, {}});
    CHECK_FALSE(none.mean_gamma);
}

TEST_CASE("ensemble invariants and thread-count independence")
{
    const EnsembleConfig c = cheap_config(0.9, 64);
    const SwitchStats a = run_ensemble(c, RunOptions{1});
    const SwitchStats b = run_ensemble(c, RunOptions{4});
    CHECK(a.n_runs == 64);
    CHECK(a.n_switched + a.n_censored + a.n_failed == a.n_runs);
    CHECK(static_cast<std::int64_t>(a.times.size()) == a.n_switched);
    for (double t : a.times) {
        CHECK(t > 0.0);
        CHECK(t <= c.scenario.sim.tau_max);
    }
    CHECK(a.times == b.times);
    CHECK(a.mean_gamma == b.mean_gamma);
    CHECK(a.sem_sq_gamma == b.sem_sq_gamma);

    EnsembleConfig other = c;
    other.master_seed = 18;
    CHECK(run_ensemble(other, RunOptions{1}).times != a.times);
}

TEST_CASE("outcomes are indexed by stream id")
{
    const EnsembleConfig c = cheap_config(0.9, 16);
    const Problem p = make_problem(c.scenario);
    const auto all = run_outcomes(p, 16, c.master_seed, RunOptions{2});
    for (std::uint64_t id = 0; id < 16; ++id)
        CHECK(all[id] == run_trajectory(p, RngStream{c.master_seed, id}).outcome);
}

TEST_CASE("bias sweep: switching grows with bias and seed policies differ as documented")
{
    const EnsembleConfig c = cheap_config(0.9, 64);
    const std::vector<double> grid = {0.7, 0.95, 0.999};
    const auto points = sweep(c, SweepAxis::Bias, grid, SeedPolicy::PerPoint, RunOptions{1});
    REQUIRE(points.size() == 3);
    CHECK(points[0].value == 0.7);
    CHECK(points[0].stats.n_switched <= points[1].stats.n_switched);
    CHECK(points[1].stats.n_switched <= points[2].stats.n_switched);
    CHECK(points[2].stats.n_switched == 64);

    EnsembleConfig point2 = c;
    point2.scenario = with_axis_value(c.scenario, SweepAxis::Bias, 0.999);
    point2.master_seed = c.master_seed + 2;
    CHECK(run_ensemble(point2, RunOptions{1}).times == points[2].stats.times);

    const auto matched = sweep(c, SweepAxis::Bias, grid, SeedPolicy::Matched, RunOptions{1});
    point2.master_seed = c.master_seed;
    CHECK(run_ensemble(point2, RunOptions{1}).times == matched[2].stats.times);

    const auto rows = sweep_rows(points);
    CHECK(rows.size() == 3);
    CHECK(rows[0].size() == sweep_columns().size());
}

TEST_CASE("axis values land in the right scenario field")
{
    const Scenario base = cheap_config(0.9, 1).scenario;
    CHECK(with_axis_value(base, SweepAxis::Bias, 0.8).op.i_b == 0.8);
    CHECK(with_axis_value(base, SweepAxis::Temperature, 0.2).op.T == 0.2);
    CHECK(with_axis_value(base, SweepAxis::PhotonNumber, 7.0).drive.photons == 7.0);
    CHECK(with_axis_value(base, SweepAxis::DriveAmplitude, 0.01).drive.i_mw == 0.01);
    CHECK(parse_sweep_axis("temperature") == SweepAxis::Temperature);
    CHECK_THROWS_AS(parse_sweep_axis("pressure"), Error);
}

TEST_CASE("ensemble rejects an empty run count")
{
    EnsembleConfig c = cheap_config(0.9, 0);
    CHECK_THROWS_AS(run_ensemble(c), Error);
}
