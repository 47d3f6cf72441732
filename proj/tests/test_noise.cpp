#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mirrorsim/analysis.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/gaussian_solver.hpp"
#include "mirrorsim/noise_synth.hpp"
#include "support.hpp"

using namespace mirrorsim;
using namespace testing;

namespace {
const Environment env;
const OpticalBeam centred(62.5e-6, 810e-9);
}  // namespace

TEST_CASE("susceptibility limits") {
    const Mode m = simple_mode(100e3, 1e4, 1e-3);
    const double k = m.mass() * m.omega() * m.omega();
    const auto dc = susceptibility(m, 0.0);
    CHECK(dc.real() == doctest::Approx(1.0 / k / (1 + 1e-8)).epsilon(1e-12));
    const auto res = susceptibility(m, m.omega());
    CHECK(std::abs(res) == doctest::Approx(1e4 / k).epsilon(1e-12));
    CHECK(std::arg(res) == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK_THROWS_AS(susceptibility(m, -1.0), DomainError);
}

TEST_CASE("half-power points sit at Omega_n +- Gamma/2") {
    const Mode m = simple_mode(100e3, 1e4, 1e-3);
    const double peak = std::norm(susceptibility(m, m.omega()));
    const double g = m.damping_rate();
    // Scan |chi|^2 on a fine grid and locate both half-power crossings.
    double lo = 0, hi = 0;
    for (int i = -200000; i < 200000; ++i) {
        const double w0 = m.omega() + g * i / 100000.0, w1 = m.omega() + g * (i + 1) / 100000.0;
        const double a = std::norm(susceptibility(m, w0)) - peak / 2, b = std::norm(susceptibility(m, w1)) - peak / 2;
        if (a < 0 && b >= 0) lo = w0 + (w1 - w0) * (-a) / (b - a);
        if (a >= 0 && b < 0) hi = w0 + (w1 - w0) * a / (a - b);
    }
    CHECK((m.omega() - lo) == doctest::Approx(g / 2).epsilon(1e-3));
    CHECK((hi - m.omega()) == doctest::Approx(g / 2).epsilon(1e-3));
}

TEST_CASE("property: passive dissipation keeps Im chi positive") {
    const Mode m = simple_mode(50e3, 300, 2e-3);
    for (int i = 1; i <= 2000; ++i) CHECK(susceptibility(m, m.omega() * i / 500.0).imag() > 0.0);
}

TEST_CASE("langevin force spectrum") {
    const Mode m = simple_mode(100e3, 1e4, 1e-3);
    CHECK(langevin_psd(m, env, m.omega()) == doctest::Approx(2 * m.mass() * m.damping_rate() * env.thermal_energy()).epsilon(1e-12));
    CHECK(langevin_psd(m, env, m.omega() / 2) / langevin_psd(m, env, m.omega()) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(langevin_psd(m, env, 0.0), DomainError);

    // M = 1 g, Gamma = 2 pi 10 Hz at resonance.
    const Mode ex = simple_mode(1e5, 1e5 / 10.0, 1e-3);
    CHECK(langevin_psd(ex, env, ex.omega()) == doctest::Approx(frozen::langevin_example).epsilon(1e-6));
    const double w = 0.7 * ex.omega();
    const std::complex<double> inv(ex.mass() * (ex.omega() * ex.omega() - w * w), -ex.mass() * ex.loss_angle() * ex.omega() * ex.omega());
    CHECK(langevin_psd(ex, env, w) == doctest::Approx(-2 * env.thermal_energy() / w * inv.imag()).epsilon(1e-12));
}

TEST_CASE("effective mass") {
    const Material silica = Material::fused_silica();
    const Mode g100 = make_gaussian_mode(mirror_a(), silica, {1, 0, 0});
    const EffectiveMass me = effective_mass(g100, centred);
    CHECK(me.kg == doctest::Approx(g100.mass()).epsilon(2e-3));
    CHECK(rel(me.kg, 153e-6) < 5e-2);

    const Mode tilted = make_gaussian_mode(mirror_a(), silica, {1, 0, 1});
    const EffectiveMass inf = effective_mass(tilted, centred);
    CHECK(inf.decoupled);
    CHECK(std::isinf(inf.kg));
    CHECK(inf.diagnostic.find("gauss 1 0 1") != std::string::npos);
    const EffectiveMass off = effective_mass(tilted, centred.recentered({1e-3, 0.0}));
    CHECK_FALSE(off.decoupled);
    CHECK(std::isfinite(off.kg));
    CHECK(off.kg > tilted.mass());
    CHECK_THROWS_AS(effective_mass(g100, centred.recentered({20e-3, 0.0})), DomainError);
}

TEST_CASE("displacement spectrum peak, additivity and linewidth") {
    const Mode a = simple_mode(100e3, 1e4, 1e-3), b = simple_mode(103e3, 5e3, 2e-3);
    const double wn = a.omega();
    CHECK(displacement_psd_angular(a, a.mass(), env, wn) ==
          doctest::Approx(2 * env.thermal_energy() * 1e4 / (a.mass() * wn * wn * wn)).epsilon(1e-12));

    const auto grid = FrequencyGrid::from_range(95e3, 108e3, 0.5);
    const auto one = displacement_psd(std::span<const Mode>(&a, 1), centred, env, grid);
    const auto two = displacement_psd(std::span<const Mode>(&b, 1), centred, env, grid);
    const std::vector<Mode> both{a, b};
    const auto sum = displacement_psd(both, centred, env, grid);
    for (std::size_t i = 0; i < grid.count; ++i)
        CHECK(sum.psd()[i] == doctest::Approx(one.psd()[i] + two.psd()[i]).epsilon(1e-14));

    for (double q : {100.0, 1e3, 1e4}) {
        const Mode m = simple_mode(100e3, q, 1e-3);
        const double fw = 100e3 / q;
        const auto fine = FrequencyGrid::from_range(100e3 - 5 * fw, 100e3 + 5 * fw, fw / 2000);
        const auto s = displacement_psd(std::span<const Mode>(&m, 1), centred, env, fine);
        const auto top = std::max_element(s.psd().begin(), s.psd().end());
        const double half = *top / 2;
        const auto left = std::find_if(s.psd().begin(), top, [&](double v) { return v >= half; });
        const auto right = std::find_if(top, s.psd().end(), [&](double v) { return v < half; });
        const double width = static_cast<double>(right - left) * fine.f_step;
        CAPTURE(q);
        CHECK(width == doctest::Approx(fw).epsilon(2e-2));
    }
}

TEST_CASE("property: equipartition over the resonance band") {
    for (double q : {1e2, 1e4, 6.5e5}) {
        const Mode m = simple_mode(200e3, q, 5e-4);
        const double wn = m.omega(), g = m.damping_rate();
        const auto s = [&](double w) { return displacement_psd_angular(m, m.mass(), env, w); };
        // Two-sided density per rad/s: both signs contribute, hence 2 / (2 pi).
        std::vector<double> cuts{wn / 2};
        for (double k : {-200.0, -20.0, -2.0, 0.0, 2.0, 20.0, 200.0})
            if (wn + k * g > wn / 2 && wn + k * g < 2 * wn) cuts.push_back(wn + k * g);
        cuts.push_back(2 * wn);
        double total = 0;
        for (std::size_t i = 1; i < cuts.size(); ++i) total += oracle_integral(s, cuts[i - 1], cuts[i]);
        total *= 2 / (2 * kPi);
        CAPTURE(q);
        CHECK(rel(total, env.thermal_energy() / (m.mass() * wn * wn)) < 1e-2);
    }
}

TEST_CASE("two nearly identical mirrors give twin peaks") {
    const std::vector<MirrorCatalog> cats{{"input", {simple_mode(332e3, 6600, 1e-3)}},
                                          {"end", {simple_mode(332e3 * 1.004, 6600, 1e-3)}}};
    const auto s = displacement_psd(cats, centred, env, FrequencyGrid::from_range(330e3, 336e3, 1.0));
    CHECK(s.meta().mirrors == std::vector<std::string>{"input", "end"});
    CHECK(detect_peaks(s).size() == 2);
}

TEST_CASE("phase conversion and frequency calibration") {
    CHECK(phase_shift(810e-9 / 4, 810e-9) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(phase_shift(0.0, 810e-9) == 0.0);
    CHECK(phase_shift(1e-17, 810e-9) == doctest::Approx(frozen::psi_example).epsilon(1e-6));
    const double nu = kSpeedOfLight / 810e-9;
    CHECK(calibrate_displacement(7e3, nu, 0.23e-3) == doctest::Approx(frozen::delta_u_example).epsilon(1e-6));
    CHECK(calibrate_displacement(0.0, nu, 0.23e-3) == 0.0);
    CHECK(calibrate_displacement(7e3, nu, 0.46e-3) == doctest::Approx(2 * calibrate_displacement(7e3, nu, 0.23e-3)).epsilon(1e-15));
    CHECK_THROWS_AS(calibrate_displacement(7e3, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(calibrate_displacement(7e3, nu, -1.0), DomainError);
}

TEST_CASE("resolution bandwidth") {
    // FWHM 5 Hz at 100 kHz.
    const Mode m = simple_mode(100e3, 100e3 / 5.0, 1e-3);
    const auto grid = FrequencyGrid::from_range(97e3, 103e3, 0.1);
    const Spectrum s = displacement_psd(std::span<const Mode>(&m, 1), centred, env, grid);
    const double peak = *std::max_element(s.psd().begin(), s.psd().end());

    const Spectrum wide = apply_rbw(s, 300.0);
    CHECK(wide.meta().rbw == 300.0);
    CHECK(wide.total_power() == doctest::Approx(s.total_power()).epsilon(1e-3));
    const double wide_peak = *std::max_element(wide.psd().begin(), wide.psd().end());
    CHECK(wide_peak / peak == doctest::Approx(frozen::rbw_peak_ratio).epsilon(1e-2));

    const Spectrum narrow = apply_rbw(s, 0.4);
    CHECK(*std::max_element(narrow.psd().begin(), narrow.psd().end()) == doctest::Approx(peak).epsilon(1e-2));
    CHECK(narrow.total_power() == doctest::Approx(s.total_power()).epsilon(1e-12));
    CHECK_THROWS_AS(apply_rbw(s, 0.05), DomainError);
}

TEST_CASE("spectrum invariants") {
    CHECK_THROWS_AS(FrequencyGrid::from_range(0.0, 10.0, 1.0), DomainError);
    CHECK_THROWS_AS(FrequencyGrid::from_range(10.0, 5.0, 1.0), DomainError);
    CHECK_THROWS_AS(Spectrum(FrequencyGrid{1.0, 1.0, 2}, {1.0, -1.0}), DomainError);
    CHECK_THROWS_AS(Spectrum(FrequencyGrid{1.0, 1.0, 3}, {1.0, 1.0}), DomainError);
    const auto grid = FrequencyGrid::from_range(1e3, 2e3, 10.0);
    CHECK(grid.count == 101);
    CHECK(grid.f_end() == doctest::Approx(2e3));
}

TEST_CASE("measurement noise is reproducible per seed") {
    const Spectrum s(FrequencyGrid{1e3, 1.0, 500}, std::vector<double>(500, 1e-30));
    const auto a = add_measurement_noise(s, 1e-31, 50, 7), b = add_measurement_noise(s, 1e-31, 50, 7);
    const auto c = add_measurement_noise(s, 1e-31, 50, 8);
    CHECK(a.psd() == b.psd());
    CHECK(a.psd() != c.psd());
    double mean = 0;
    for (double v : a.psd()) mean += v / 500;
    CHECK(mean == doctest::Approx(1.1e-30).epsilon(0.03));
}
