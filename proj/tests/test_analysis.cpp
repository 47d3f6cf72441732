#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mirrorsim/analysis.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/gaussian_solver.hpp"
#include "support.hpp"

using namespace mirrorsim;
using namespace testing;

namespace {
const Environment env;
const OpticalBeam centred(62.5e-6, 810e-9);

Spectrum single_peak(double f0, double q, double mass, double span_fwhm = 40.0, double bins_per_fwhm = 20.0) {
    const double fwhm = f0 / q;
    const double step = fwhm / bins_per_fwhm;
    const auto grid = FrequencyGrid::from_range(f0 - span_fwhm * fwhm, f0 + span_fwhm * fwhm, step);
    const std::vector<Mode> modes{simple_mode(f0, q, mass)};
    return displacement_psd(modes, centred, env, grid);
}

// Amplitude record exp(-Gamma t / 2) with Gamma = 2 pi f / Q.
std::pair<std::vector<double>, std::vector<double>> decay(double f, double q, double a0, int n = 400, double lifetimes = 3.0) {
    const double gamma = 2 * kPi * f / q;
    std::vector<double> t(n), a(n);
    for (int i = 0; i < n; ++i) {
        t[i] = lifetimes * 2.0 / gamma * i / (n - 1);
        a[i] = a0 * std::exp(-gamma * t[i] / 2);
    }
    return {t, a};
}
}  // namespace

TEST_CASE("detect_peaks on flat and structured spectra") {
    const auto grid = FrequencyGrid::from_range(1e3, 2e3, 1.0);
    const Spectrum flat(grid, std::vector<double>(grid.count, 1e-30));
    CHECK(detect_peaks(flat).empty());

    // Twin peaks 20 linewidths apart.
    const std::vector<Mode> twins{simple_mode(332e3, 6600, 3e-4), simple_mode(332e3 + 20 * 332e3 / 6600, 6600, 3e-4)};
    const Spectrum s = displacement_psd(twins, centred, env, FrequencyGrid::from_range(331e3, 334e3, 1.0));
    const auto peaks = detect_peaks(s);
    REQUIRE(peaks.size() == 2);
    CHECK(s.frequency(peaks[0].peak) == doctest::Approx(332e3).epsilon(2e-6));
    CHECK(peaks[0].end <= peaks[1].begin + 1);  // the dip bin is shared
    CHECK_THROWS_AS(detect_peaks(s, 0.5), DomainError);
}

TEST_CASE("detect_peaks finds each tabulated cylinder resonance once") {
    const double khz[] = {143, 377, 405, 460, 468, 483, 73, 210, 330, 406, 491, 435, 135, 268, 317, 334, 400, 436, 475, 314, 459};
    std::vector<Mode> modes;
    for (double f : khz) modes.push_back(simple_mode(f * 1e3, 1e4, 1e-3));
    const Spectrum s = displacement_psd(modes, centred, env, FrequencyGrid::from_range(50e3, 500e3, 2.0));
    const auto peaks = detect_peaks(s);
    CHECK(peaks.size() == std::size(khz));
    for (double f : khz) {
        const auto n = std::count_if(peaks.begin(), peaks.end(), [&](const PeakWindow& w) {
            return std::abs(s.frequency(w.peak) - f * 1e3) <= 2 * s.grid().f_step;
        });
        CHECK(n == 1);
    }
}

TEST_CASE("fit_lorentzian recovers the 332 kHz resonance") {
    const double f0 = 332e3, q = 6600, m = 3e-4;
    const Spectrum s = single_peak(f0, q, m);
    const auto peaks = detect_peaks(s);
    REQUIRE(peaks.size() == 1);
    const PeakFit fit = fit_lorentzian(s, peaks[0], env);
    CHECK(fit.frequency == doctest::Approx(f0).epsilon(1e-6));
    CHECK(fit.quality_factor == doctest::Approx(q).epsilon(1e-4));
    CHECK(fit.effective_mass == doctest::Approx(m).epsilon(1e-4));
    CHECK(fit.linewidth == doctest::Approx(f0 / q).epsilon(1e-4));
    CHECK(fit.area == doctest::Approx(env.thermal_energy() / (m * std::pow(2 * kPi * f0, 2))).epsilon(1e-4));
    CHECK(std::abs(s.frequency(peaks[0].peak) - f0) <= s.grid().f_step);
}

TEST_CASE("fit_lorentzian rejects a window without a resonance") {
    const auto grid = FrequencyGrid::from_range(1e5, 1.001e5, 1.0);
    std::mt19937_64 rng(7);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> psd(grid.count);
    for (auto& v : psd) v = 1e-30 * e(rng);
    const Spectrum s(grid, psd);
    CHECK_THROWS_AS(fit_lorentzian(s, PeakWindow{0, grid.count, grid.count / 2}, env), FitError);
    CHECK_THROWS_AS(fit_lorentzian(s, PeakWindow{5, 3, 4}, env), Error);
}

TEST_CASE("property: randomized fit round-trip") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lf(std::log(5e4), std::log(5e6)), lq(std::log(1e3), std::log(1e6)),
        lm(std::log(1e-4), std::log(1e-1)), bins(10.0, 30.0);
    for (int k = 0; k < 25; ++k) {
        const double f0 = std::exp(lf(rng)), q = std::exp(lq(rng)), m = std::exp(lm(rng));
        const Spectrum s = single_peak(f0, q, m, 30.0, bins(rng));
        const auto peaks = detect_peaks(s);
        REQUIRE(peaks.size() == 1);
        const PeakFit fit = fit_lorentzian(s, peaks[0], env);
        CHECK(rel(fit.frequency, f0) < 1e-4);
        CHECK(rel(fit.quality_factor, q) < 1e-2);
        CHECK(rel(fit.effective_mass, m) < 1e-2);
    }
}

TEST_CASE("fit survives measurement noise") {
    const double f0 = 332e3, q = 6600, m = 3e-4;
    const Spectrum clean = single_peak(f0, q, m);
    const double peak = *std::max_element(clean.psd().begin(), clean.psd().end());
    const Spectrum noisy = add_measurement_noise(clean, 1e-3 * peak, 200, 11);
    const auto peaks = detect_peaks(noisy);
    REQUIRE(!peaks.empty());
    const PeakFit fit = fit_lorentzian(noisy, peaks[0], env);
    CHECK(rel(fit.frequency, f0) < 1e-5);
    CHECK(rel(fit.quality_factor, q) < 0.05);
    CHECK(rel(fit.effective_mass, m) < 0.05);
}

TEST_CASE("ringdown_q on clean decays") {
    for (double q : {3.5e5, 6.5e5, 1e4}) {
        const auto [t, a] = decay(7.7e6, q, 1e-12);
        const RingdownFit fit = ringdown_q(t, a, 7.7e6);
        CHECK(fit.quality_factor == doctest::Approx(q).epsilon(1e-9));
        CHECK(fit.gamma == doctest::Approx(2 * kPi * 7.7e6 / q).epsilon(1e-9));
        CHECK(fit.amplitude0 == doctest::Approx(1e-12).epsilon(1e-9));
    }
}

TEST_CASE("property: ringdown Q is invariant under amplitude scaling") {
    auto [t, a] = decay(1.17e6, 3.5e5, 1.0);
    const double q1 = ringdown_q(t, a, 1.17e6).quality_factor;
    for (auto& v : a) v *= 1e-14;
    CHECK(ringdown_q(t, a, 1.17e6).quality_factor == doctest::Approx(q1).epsilon(1e-12));
}

TEST_CASE("ringdown_q rejects records without a decay") {
    const std::vector<double> t{0, 1, 2, 3, 4}, flat{1, 1, 1, 1, 1};
    CHECK_THROWS_AS(ringdown_q(t, flat, 1e6), FitError);
    const std::vector<double> rising{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(ringdown_q(t, rising, 1e6), FitError);
    const std::vector<double> erratic{1, 0.1, 0.9, 0.05, 0.8};
    CHECK_THROWS_AS(ringdown_q(t, erratic, 1e6), FitError);
    const std::vector<double> negative{1, 0.5, -0.2, 0.1, 0.05};
    CHECK_THROWS_AS(ringdown_q(t, negative, 1e6), Error);
    const std::vector<double> short_t{0, 1};
    CHECK_THROWS_AS(ringdown_q(short_t, std::vector<double>{1.0}, 1e6), Error);
}

TEST_CASE("ringdown and spectral fit agree") {
    const double f0 = 200e3, q = 2e4, m = 1e-3;
    const Spectrum s = single_peak(f0, q, m);
    const PeakFit fit = fit_lorentzian(s, detect_peaks(s).at(0), env);
    const auto [t, a] = decay(f0, q, 1.0);
    CHECK(rel(ringdown_q(t, a, f0).quality_factor, fit.quality_factor) < 0.05);
}

TEST_CASE("label_modes pairs by relative error") {
    const std::vector<Mode> predicted{simple_mode(143e3, 1e4, 1e-3, 12.7e-3, CylIndex{0, 0, 1}),
                                      simple_mode(405e3, 1e4, 1e-3, 12.7e-3, CylIndex{0, 0, 3}),
                                      simple_mode(73e3, 1e4, 1e-3, 12.7e-3, CylIndex{0, 1, 1})};
    const std::vector<double> measured{146e3, 75e3};
    const auto a = label_modes(measured, predicted, 0.03);
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0].measured == 1);  // ordered by prediction: 73 kHz first
    CHECK(a.pairs[1].relative_error == doctest::Approx(3.0 / 146).epsilon(1e-12));
    CHECK(a.unmatched_predicted == std::vector<std::size_t>{1});
    CHECK(a.unmatched_measured.empty());

    const auto strict = label_modes(measured, predicted, 0.01);
    CHECK(strict.pairs.empty());
    CHECK(label_modes(std::vector<double>{}, predicted, 0.03).pairs.empty());
    CHECK_THROWS_AS(label_modes(measured, predicted, 0.0), DomainError);
    CHECK_THROWS_AS(label_modes(measured, predicted, -1.0), DomainError);
}

TEST_CASE("label_modes breaks exact ties by the smaller modal mass") {
    const std::vector<Mode> predicted{simple_mode(330e3, 1e4, 1.23e-3, 12.7e-3, CylIndex{0, 1, 3}),
                                      simple_mode(334e3, 1e4, 2.79e-3, 12.7e-3, CylIndex{1, 1, 4})};
    const auto a = label_modes(std::vector<double>{332e3}, predicted, 0.03);
    REQUIRE(a.pairs.size() == 1);
    CHECK(a.pairs[0].predicted == 0);
    CHECK(a.unmatched_predicted == std::vector<std::size_t>{1});
}

TEST_CASE("property: label_modes is invariant under measured permutations") {
    std::vector<Mode> predicted;
    std::vector<double> measured;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    for (int k = 0; k < 15; ++k) {
        const double f = 50e3 + 29e3 * k;
        predicted.push_back(simple_mode(f, 1e4, 1e-3 * (1 + k), 12.7e-3, CylIndex{0, 0, k + 1}));
        measured.push_back(f * (1 + jitter(rng)));
    }
    const auto reference = label_modes(measured, predicted, 0.03);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::size_t> perm(measured.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> shuffled;
        for (auto i : perm) shuffled.push_back(measured[i]);
        const auto a = label_modes(shuffled, predicted, 0.03);
        REQUIRE(a.pairs.size() == reference.pairs.size());
        for (std::size_t i = 0; i < a.pairs.size(); ++i) {
            CHECK(a.pairs[i].predicted == reference.pairs[i].predicted);
            CHECK(perm[a.pairs[i].measured] == reference.pairs[i].measured);
        }
    }
}

namespace {
ScanMap gaussian_map(GaussIndex idx, int lines, double spacing) {
    const Mode m = make_gaussian_mode(mirror_b(), Material::fused_silica(), idx);
    ScanConfig cfg;
    cfg.lines = lines;
    cfg.sample_spacing = spacing;
    return raster_scan(m, OpticalBeam(62.5e-6, 810e-9, {0.3e-3, 0.2e-3}), cfg, env);
}

double lg_form(double r, double w, int l, int p) {
    const double x = r / w;
    return std::pow(x, l) * oracle_laguerre(p, l, 2 * x * x) * std::exp(-x * x);
}
}  // namespace

TEST_CASE("radial profile of an axisymmetric map") {
    const ScanMap map = gaussian_map({4, 0, 0}, 50, 1e-4);
    const RadialProfile prof = radial_profile(map, 0);
    CHECK(prof.points.size() == 25);
    const WaistFit fit = fit_waist(prof, 0, 0);
    CHECK(fit.waist == doctest::Approx(frozen::w_b4_mm * 1e-3).epsilon(0.01));
    CHECK(fit.rms_residual < 0.01);
}

TEST_CASE("(4,1,3) profile matches the Laguerre-Gauss form at the fitted waist") {
    const double w = fit_waist(radial_profile(gaussian_map({4, 0, 0}, 50, 1e-4), 0), 0, 0).waist;
    const RadialProfile prof = radial_profile(gaussian_map({4, 1, 3}, 50, 1e-4), 3);
    CHECK(profile_residual(prof, 3, 1, w).rms_residual < 0.02);
}

TEST_CASE("radial_profile errors") {
    const ScanMap map = gaussian_map({4, 1, 3}, 20, 2e-4);
    CHECK_THROWS_AS(radial_profile(map, 3, 1.01), DomainError);
    CHECK_THROWS_AS(radial_profile(map, -1), DomainError);
    ScanMap empty = map;
    empty.points.clear();
    CHECK_THROWS_AS(radial_profile(empty, 0), DomainError);
}

TEST_CASE("property: profile error shrinks with finer sampling") {
    const double w = acoustic_waist(mirror_b(), 4);
    const double coarse = profile_residual(radial_profile(gaussian_map({4, 1, 3}, 24, 2e-4), 3), 3, 1, w).rms_residual;
    const double fine = profile_residual(radial_profile(gaussian_map({4, 1, 3}, 96, 5e-5), 3), 3, 1, w).rms_residual;
    CHECK(fine < 0.75 * coarse);
}

TEST_CASE("fit_waist on an exact profile") {
    for (auto [l, p] : {std::pair{0, 0}, std::pair{3, 1}, std::pair{1, 2}}) {
        RadialProfile prof;
        for (int i = 0; i < 40; ++i) {
            const double r = 12.7e-3 * (i + 0.5) / 40;
            prof.points.push_back({r, 3e-14 * lg_form(r, 2.0e-3, l, p), 10});
        }
        const WaistFit fit = fit_waist(prof, l, p);
        CHECK(fit.waist == doctest::Approx(2.0e-3).epsilon(5e-3));
        CHECK(fit.amplitude == doctest::Approx(3e-14).epsilon(1e-2));
        for (auto& pt : prof.points) pt.value *= -7.0;
        CHECK(fit_waist(prof, l, p).waist == doctest::Approx(fit.waist).epsilon(1e-9));
    }
}
