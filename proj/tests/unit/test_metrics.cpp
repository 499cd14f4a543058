#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "cbjj/error.hpp"
#include "cbjj/metrics.hpp"

using namespace cbjj;

namespace {

const JunctionParams kJJ1{8.586e-6, 29.0, 2700e-15};

Scenario cheap_scenario(double i_b)
{
    Scenario s;
    s.junction = kJJ1;
    s.op = {i_b, 0.05};
    s.sim.dt = 1e-3;
    s.sim.tau_max = 20.0;
    return s;
}

SwitchStats stats_of(const std::vector<double>& times)
{
    std::vector<SwitchOutcome> o;
    for (double t : times)
        o.push_back({t});
    return summarize(o);
}

}  // namespace

TEST_CASE("KC index worked example")
{
    // Means 10 and 12, squared standard errors 1 and 3: 2 / sqrt(2).
    CHECK(kc_index(10.0, 1.0, 12.0, 3.0) == doctest::Approx(1.4142135623730951).epsilon(1e-15));
    CHECK(kc_index(12.0, 3.0, 10.0, 1.0) == kc_index(10.0, 1.0, 12.0, 3.0));
    CHECK(kc_index(5.0, 0.0, 5.0, 0.0) == 0.0);
    CHECK_THROWS_AS(kc_index(5.0, 0.0, 6.0, 0.0), Error);
}

TEST_CASE("KC index is invariant under shifts and scalings of the times")
{
    const std::vector<double> a = {1.0, 2.5, 3.0, 4.5, 7.0};
    const std::vector<double> b = {2.0, 2.2, 5.0, 6.0, 6.5, 9.0};
    const double d = kc_index(stats_of(a), stats_of(b)).d_kc;
    for (double scale : {0.1, 3.0}) {
        for (double shift : {-1.0, 10.0}) {
            std::vector<double> a2, b2;
            for (double t : a)
                a2.push_back(scale * t + shift + 20.0);
            for (double t : b)
                b2.push_back(scale * t + shift + 20.0);
            CHECK(kc_index(stats_of(a2), stats_of(b2)).d_kc == doctest::Approx(d).epsilon(1e-12));
        }
    }
    CHECK(kc_index(stats_of(a), stats_of(a)).d_kc == 0.0);
}

TEST_CASE("KC index needs two switched runs per ensemble")
{
    try {
        kc_index(stats_of({1.0}), stats_of({1.0, 2.0}));
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientData);
    }
    const KCResult r = kc_index(stats_of({1.0, 3.0}), stats_of({2.0, 4.0, 6.0}));
    CHECK(r.mean0 == 2.0);
    CHECK(r.mean1 == 4.0);
    CHECK(r.sem_sq0 == doctest::Approx(1.0));
    CHECK(r.sem_sq1 == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("detection figures follow from S_vv, delta_V and the probe")
{
    const DetectionReport r = detection_figures(4e-18, 2e-6, 0.005, kJJ1);
    const double I_mw = 0.005 * kJJ1.I0;
    const double P = I_mw * I_mw * kJJ1.R;
    CHECK(r.S_v == doctest::Approx(2e-9));
    CHECK(r.P_in == doctest::Approx(P));
    CHECK(r.S == doctest::Approx(2e-6 / P));
    CHECK(r.NEP == doctest::Approx(2e-9 * P / 2e-6));
    CHECK(r.I_min == doctest::Approx(std::sqrt(r.NEP / kJJ1.R)));
    CHECK(r.NEP * r.S == doctest::Approx(r.S_v));
    CHECK_THROWS_AS(detection_figures(4e-18, 0.0, 0.005, kJJ1), Error);
    CHECK_THROWS_AS(detection_figures(4e-18, 1e-6, 0.0, kJJ1), Error);
}

TEST_CASE("voltage PSD of the trapped junction peaks at the plasma frequency")
{
    Scenario s = cheap_scenario(0.789);
    s.op.T = 1.0;
    s.sim.dt = 1e-2;
    const DerivedScales sc = derive_scales(kJJ1);
    const double f_star = sc.omega_J_star(0.789) / (2.0 * std::numbers::pi);
    PsdOptions o;
    o.probe_hz = f_star;
    o.seed = 3;
    const VoltagePsd psd = voltage_noise_psd(s, o);
    const auto peak = std::max_element(psd.s_vv.begin() + 1, psd.s_vv.end());
    const double f_peak = psd.frequency_hz[static_cast<std::size_t>(peak - psd.s_vv.begin())];
    CHECK(f_peak == doctest::Approx(f_star).epsilon(0.05));
    CHECK(psd.probe_hz == f_star);
    CHECK(psd.segment_length >= o.min_segment);
    CHECK(psd.segment_length <= o.max_segment);
    CHECK(std::abs(psd.probe_offset_bins) <= 0.5);
    CHECK(psd.s_vv_at_probe > 0.0);

    PsdOptions few = o;
    few.n_samples = 1000;
    CHECK_THROWS_AS(voltage_noise_psd(s, few), Error);
}

TEST_CASE("responsivity of a resonant probe")
{
    Scenario s = cheap_scenario(0.789);
    s.drive.kind = DriveKind::ContinuousWave;
    s.drive.i_mw = 0.005;
    ResponsivityOptions o;
    o.pairs = 8;
    o.seed = 4;
    o.run.threads = 1;
    const ResponsivityResult r = responsivity(s, o);
    CHECK(r.pairs == 8);
    CHECK(r.pair_V_driven.size() == 8);
    CHECK(r.delta_V == doctest::Approx(std::abs(r.mean_V_driven - r.mean_V_undriven)));
    double sum = 0.0;
    for (double v : r.pair_V_driven)
        sum += v;
    CHECK(sum / 8.0 == doctest::Approx(r.mean_V_driven));
    CHECK(r.delta_V > 0.0);

    Scenario quiet = cheap_scenario(0.789);
    CHECK_THROWS_AS(responsivity(quiet, o), Error);
}

TEST_CASE("photon threshold on a coarse grid")
{
    Scenario s = cheap_scenario(0.9);
    s.drive.kind = DriveKind::PhotonPulse;
    s.drive.t_d_ns = 0.05;
    PhotonThresholdOptions o;
    o.n_runs = 64;
    o.seed = 5;
    o.run.threads = 1;
    const std::vector<double> grid = {0.0, 2000.0};
    // A zero-photon pulse reproduces the reference exactly under matched seeds.
    const PhotonThresholdResult r = photon_threshold(s, 0.0, grid, o);
    REQUIRE(r.curve.size() == 2);
    REQUIRE(r.curve[0].d_kc);
    CHECK(*r.curve[0].d_kc == 0.0);
    REQUIRE(r.n_min);
    CHECK(*r.n_min == 2000.0);
    CHECK(require_threshold(r) == 2000.0);

    const PhotonThresholdResult none = photon_threshold(s, 1e9, grid, o);
    CHECK_FALSE(none.n_min);
    try {
        require_threshold(none);
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotFound);
    }
    CHECK_THROWS_AS(photon_threshold(s, 0.0, std::vector<double>{5.0, 1.0}, o), Error);
}

TEST_CASE("bias optimization on a single bias point")
{
    Scenario s = cheap_scenario(0.9);
    s.drive.kind = DriveKind::PhotonPulse;
    s.drive.t_d_ns = 0.05;
    PhotonThresholdOptions o;
    o.n_runs = 32;
    o.seed = 6;
    o.run.threads = 1;
    const std::vector<double> bias = {0.9};
    const std::vector<double> grid = {0.0, 2000.0};
    const OptimizeBiasResult r = optimize_bias(s, bias, 0.0, grid, o);
    REQUIRE(r.points.size() == 1);
    REQUIRE(r.best_i_b);
    CHECK(*r.best_i_b == 0.9);
    CHECK(r.best_n_min == r.points[0].threshold.n_min);
    CHECK_THROWS_AS(optimize_bias(s, std::vector<double>{1.2}, 0.0, grid, o), Error);
}
