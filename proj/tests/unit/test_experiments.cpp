#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"

#include "cbjj/csv.hpp"
#include "cbjj/error.hpp"
#include "cbjj/experiments.hpp"

using namespace cbjj;

namespace {

ExperimentSpec cheap_spec(ExperimentId id, std::uint64_t seed)
{
    ExperimentSpec s;
    s.id = id;
    s.master_seed = seed;
    s.run.threads = 1;
    s.overrides = {{"simulation.dt", "0.001"},
                   {"simulation.tau_max", "10"},
                   {"experiment.n_runs", "16"},
                   {"experiment.fig5a_grid", "0.8,0.9"}};
    return s;
}

}  // namespace

TEST_CASE("junction presets carry the published operating points")
{
    const JunctionPreset& j1 = junction_preset(JunctionId::JJ1);
    CHECK(j1.params.I0 == doctest::Approx(8.586e-6));
    CHECK(j1.params.R == 29.0);
    CHECK(j1.T == doctest::Approx(0.05));
    CHECK(j1.i_b == 0.789);
    const JunctionPreset& j3 = junction_preset(JunctionId::JJ3);
    CHECK(j3.params.C == doctest::Approx(93e-15));
    CHECK(j3.i_b == 0.825);
    const ConfigDocument d = preset_config(JunctionId::JJ2);
    CHECK(d.scenario.op.i_b == 0.786);
    CHECK(d.scenario.op.T == doctest::Approx(0.048));
    CHECK(d.scenario.noise.calibration_factor == kDefaultCalibrationFactor);
    CHECK(parse_junction("JJ2") == JunctionId::JJ2);
    CHECK_THROWS_AS(parse_junction("JJ4"), Error);
}

TEST_CASE("grid parsing")
{
    const auto g = parse_grid("0.70:0.88:0.01");
    CHECK(g.size() == 19);
    CHECK(g.front() == 0.70);
    CHECK(g.back() == doctest::Approx(0.88));
    CHECK(parse_grid("1,2.5,4") == std::vector<double>{1.0, 2.5, 4.0});
    CHECK(parse_grid("3") == std::vector<double>{3.0});
    CHECK_THROWS_AS(parse_grid("1:0:0.1"), Error);
    CHECK_THROWS_AS(parse_grid("1:2:0"), Error);
    CHECK_THROWS_AS(parse_grid("1,x"), Error);
}

TEST_CASE("experiment names and junction coverage")
{
    CHECK(all_experiments().size() == 13);
    for (ExperimentId id : all_experiments())
        CHECK(parse_experiment(to_string(id)) == id);
    CHECK(experiment_junctions(ExperimentId::Fig5a) == std::vector<JunctionId>{JunctionId::JJ1});
    CHECK(experiment_junctions(ExperimentId::Table2).size() == 3);
    ExperimentSpec s = cheap_spec(ExperimentId::Fig6, 1);
    s.junction = JunctionId::JJ2;
    try {
        run_experiment(s);
        FAIL("expected Usage error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Usage);
    }
    CHECK_THROWS_AS(parse_experiment("fig12"), Error);
}

TEST_CASE("single-photon pulse peaks shrink as the shunt resistance grows")
{
    const double expected[] = {0.23659833478741344, 0.11188455671046926, 0.098820239113360427};
    double previous = HUGE_VAL;
    int k = 0;
    for (JunctionId j : experiment_junctions(ExperimentId::Fig9)) {
        ExperimentSpec s = cheap_spec(ExperimentId::Fig9, 0);
        s.junction = j;
        const ExperimentOutput out = run_experiment(s);
        const double peak = out.manifest.results.at("peak_current_uA").get<double>();
        CHECK(peak == doctest::Approx(expected[k]).epsilon(1e-9));
        CHECK(peak < previous);
        previous = peak;
        const CsvTable t = parse_csv(out.files.at("data.csv"));
        CHECK(t.rows.size() == 2001);
        double max_seen = 0.0;
        for (const auto& row : t.rows)
            max_seen = std::max(max_seen, std::abs(row[1]));
        CHECK(max_seen <= peak * (1.0 + 1e-12));
        CHECK(max_seen > 0.95 * peak);
        ++k;
    }
}

TEST_CASE("experiment outputs are reproducible from the seed")
{
    const ExperimentOutput a = run_experiment(cheap_spec(ExperimentId::Fig5a, 7));
    const ExperimentOutput b = run_experiment(cheap_spec(ExperimentId::Fig5a, 7));
    const ExperimentOutput c = run_experiment(cheap_spec(ExperimentId::Fig5a, 8));
    CHECK(a.files == b.files);
    CHECK(a.files.at("data.csv") != c.files.at("data.csv"));
    const CsvTable t = parse_csv(a.files.at("data.csv"));
    CHECK(t.rows.size() == 2);

    const auto root = std::filesystem::temp_directory_path() / "cbjj_experiment_test";
    std::filesystem::remove_all(root);
    const auto dir_a = write_experiment(root / "a", a);
    const auto dir_b = write_experiment(root / "b", b);
    CHECK(dir_a == root / "a" / "fig5a" / "JJ1");
    const auto ma = nlohmann::json::parse(read_text(dir_a / "manifest.json"));
    const auto mb = nlohmann::json::parse(read_text(dir_b / "manifest.json"));
    CHECK(ma.at("checksums") == mb.at("checksums"));
    CHECK(ma.at("settings").at("n_runs") == 16);
    std::filesystem::remove_all(root);
}

TEST_CASE("unknown experiment settings are rejected")
{
    ExperimentSettings s;
    apply_setting(s, "n_runs", "12");
    CHECK(s.n_runs == 12);
    apply_setting(s, "fig11_grid", "1:5:1");
    CHECK(s.fig11_grid.size() == 5);
    CHECK_THROWS(apply_setting(s, "n_runs", "0"));
    CHECK_THROWS(apply_setting(s, "bogus", "1"));
}

TEST_CASE("switching knee interpolation")
{
    auto point = [](double value, int switched) {
        SweepPoint p;
        p.value = value;
        p.stats.n_runs = 100;
        p.stats.n_switched = switched;
        p.stats.n_censored = 100 - switched;
        return p;
    };
    const std::vector<SweepPoint> rising = {point(0.7, 0), point(0.8, 40), point(0.9, 80)};
    REQUIRE(switching_knee(rising));
    CHECK(*switching_knee(rising) == doctest::Approx(0.825));
    CHECK_FALSE(switching_knee(std::vector<SweepPoint>{point(0.7, 60), point(0.8, 90)}));
    CHECK_FALSE(switching_knee(std::vector<SweepPoint>{point(0.7, 10), point(0.8, 20)}));
}

TEST_CASE("noise calibration recovers a synthetic factor")
{
    CalibrationOptions o;
    o.scenario = preset_config(JunctionId::JJ1).scenario;
    o.scenario.sim.dt = 1e-3;
    o.scenario.sim.tau_max = 20.0;
    o.bias_grid = parse_grid("0.4:0.85:0.025");
    o.n_runs = 100;
    o.seed = 21;
    o.run.threads = 1;
    o.tolerance = 1e-4;
    o.factor_max = 1e5;

    // In this short-horizon regime the knee moves by ~0.15 in i_b per e-fold of the factor.
    const double truth = 5000.0;
    const auto knee = knee_for_factor(o, truth);
    REQUIRE(knee);
    o.target = *knee;
    o.scenario.noise.calibration_factor = 2000.0;
    const CalibrationResult r = calibrate_noise(o);
    CHECK_FALSE(r.reused_initial);
    CHECK(r.factor == doctest::Approx(truth).epsilon(0.02));
    REQUIRE(r.knee);
    CHECK(std::abs(*r.knee - o.target) <= o.tolerance);

    // A factor already within tolerance is kept as is.
    o.scenario.noise.calibration_factor = r.factor;
    const CalibrationResult again = calibrate_noise(o);
    CHECK(again.reused_initial);
    CHECK(again.factor == r.factor);
    CHECK(again.history.size() == 1);

    CHECK_THROWS_AS(knee_for_factor(o, 0.0), Error);
    o.scenario.noise.calibration_factor = 0.0;
    CHECK_THROWS_AS(calibrate_noise(o), Error);
}
