#include "mirrorsim/noise_synth.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mirrorsim/errors.hpp"
#include "mirrorsim/quadrature.hpp"

namespace mirrorsim {

FrequencyGrid FrequencyGrid::from_range(double f_min, double f_max, double f_step) {
    if (!(f_step > 0.0) || !(f_max > f_min))
        throw DomainError("frequency grid needs f_max > f_min and a positive step");
    const auto count = static_cast<std::size_t>(std::floor((f_max - f_min) / f_step + 1e-9)) + 1;
    FrequencyGrid grid{f_min, f_step, count};
    grid.validate();
    return grid;
}

void FrequencyGrid::validate() const {
    if (count == 0) throw DomainError("frequency grid is empty");
    if (!(f_step > 0.0)) throw DomainError("frequency grid step must be positive");
    if (!(f_start > 0.0)) throw DomainError("frequency grid must start above 0 Hz");
}

Spectrum::Spectrum(FrequencyGrid grid, std::vector<double> psd, SpectrumMeta meta)
    : grid_(grid), psd_(std::move(psd)), meta_(std::move(meta)) {
    grid_.validate();
    if (psd_.size() != grid_.count) throw DomainError("spectrum length does not match its grid");
    for (double v : psd_)
        if (!(v >= 0.0)) throw DomainError("spectral density must be non-negative");
}

double Spectrum::asd(std::size_t i) const { return std::sqrt(psd_[i]); }

double Spectrum::total_power() const {
    double sum = 0.0;
    for (double v : psd_) sum += v;
    return sum * grid_.f_step;
}

std::complex<double> susceptibility(const Mode& mode, double omega) {
    if (!(omega >= 0.0)) throw DomainError("susceptibility needs omega >= 0");
    const double wn2 = mode.omega() * mode.omega();
    return 1.0 / (mode.mass() * std::complex<double>(wn2 - omega * omega, -mode.loss_angle() * wn2));
}

double langevin_psd(const Mode& mode, const Environment& env, double omega) {
    if (!(omega > 0.0)) throw DomainError("Langevin force spectrum diverges at omega = 0");
    return -2.0 * env.thermal_energy() / omega * std::imag(1.0 / susceptibility(mode, omega));
}

double beam_overlap(const SurfaceShape& shape, const OpticalBeam& beam) {
    const auto integrand = [&](Point2 p) { return shape.at(p) * beam_intensity(beam, p); };
    const double reach = 6.0 * beam.waist();
    if (reach < 0.5 * shape.face_radius()) return integrate_disk(integrand, beam.center(), reach, 48, 96);
    return integrate_disk(integrand, {0.0, 0.0}, shape.face_radius(), 160, 256);
}

EffectiveMass effective_mass(const Mode& mode, const OpticalBeam& beam) {
    const Point2 c = beam.center();
    if (std::hypot(c.x, c.y) > mode.shape().face_radius())
        throw DomainError("beam centre lies outside the mirror face");
    EffectiveMass out;
    out.overlap = beam_overlap(mode.shape(), beam);
    // max |u| = 1 and the intensity has unit integral, so |overlap| <= 1.
    if (std::abs(out.overlap) < 1e-12) {
        out.kg = std::numeric_limits<double>::infinity();
        out.decoupled = true;
        std::ostringstream os;
        os << "mode " << to_string(mode.index()) << " has no displacement under the beam (overlap "
           << out.overlap << "); effective mass is infinite";
        out.diagnostic = os.str();
        return out;
    }
    out.kg = mode.mass() / (out.overlap * out.overlap);
    return out;
}

double displacement_psd_angular(const Mode& mode, double effective_mass, const Environment& env,
                                double omega) {
    if (!(omega > 0.0)) throw DomainError("displacement spectrum needs omega > 0");
    if (std::isinf(effective_mass)) return 0.0;
    const double wn2 = mode.omega() * mode.omega();
    const double phi = mode.loss_angle();
    const double detuning = wn2 - omega * omega;
    return 2.0 * phi * wn2 * env.thermal_energy() / (omega * effective_mass) /
           (detuning * detuning + phi * phi * wn2 * wn2);
}

Spectrum displacement_psd(std::span<const MirrorCatalog> mirrors, const OpticalBeam& beam,
                          const Environment& env, const FrequencyGrid& grid) {
    grid.validate();
    std::vector<double> psd(grid.count, 0.0);
    SpectrumMeta meta;
    for (const MirrorCatalog& mirror : mirrors) {
        meta.mirrors.push_back(mirror.label);
        for (const Mode& mode : mirror.modes) {
            const EffectiveMass m_eff = effective_mass(mode, beam);
            if (m_eff.decoupled) continue;
            for (std::size_t i = 0; i < grid.count; ++i)
                psd[i] += 2.0 * displacement_psd_angular(mode, m_eff.kg, env, 2.0 * kPi * grid.at(i));
        }
    }
    return Spectrum(grid, std::move(psd), std::move(meta));
}

Spectrum displacement_psd(std::span<const Mode> modes, const OpticalBeam& beam, const Environment& env,
                          const FrequencyGrid& grid) {
    const MirrorCatalog single{"mirror", std::vector<Mode>(modes.begin(), modes.end())};
    return displacement_psd(std::span<const MirrorCatalog>(&single, 1), beam, env, grid);
}

double phase_shift(double displacement, double wavelength) {
    if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
    return 4.0 * kPi * displacement / wavelength;
}

double calibrate_displacement(double delta_nu, double nu, double cavity_length) {
    if (!(nu > 0.0)) throw DomainError("optical frequency must be positive");
    if (!(cavity_length > 0.0)) throw DomainError("cavity length must be positive");
    return cavity_length * delta_nu / nu;
}

Spectrum apply_rbw(const Spectrum& spectrum, double rbw) {
    const double df = spectrum.grid().f_step;
    if (!(rbw >= df)) {
        std::ostringstream os;
        os << "resolution bandwidth " << rbw << " Hz is below the grid spacing " << df << " Hz";
        throw DomainError(os.str());
    }
    const double sigma = rbw / std::sqrt(2.0 * kPi);  // ENBW of exp(-f^2 / 2 sigma^2)
    const auto half = static_cast<std::ptrdiff_t>(std::ceil(6.0 * sigma / df));
    std::vector<double> kernel(2 * half + 1);
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
        const double x = k * df / sigma;
        kernel[k + half] = std::exp(-0.5 * x * x);
    }

    const auto n = static_cast<std::ptrdiff_t>(spectrum.size());
    const auto& in = spectrum.psd();
    std::vector<double> out(in.size(), 0.0);
    double interior_norm = 0.0;
    for (double w : kernel) interior_norm += w;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (in[i] == 0.0) continue;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        double norm = interior_norm;
        if (lo > i - half || hi < i + half) {
            norm = 0.0;
            for (std::ptrdiff_t j = lo; j <= hi; ++j) norm += kernel[j - i + half];
        }
        const double share = in[i] / norm;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) out[j] += share * kernel[j - i + half];
    }
    SpectrumMeta meta = spectrum.meta();
    meta.rbw = rbw;
    return Spectrum(spectrum.grid(), std::move(out), std::move(meta));
}

Spectrum add_measurement_noise(const Spectrum& spectrum, double floor, int averages, std::uint64_t seed) {
    if (!(floor >= 0.0)) throw DomainError("noise floor must be non-negative");
    if (averages < 1) throw DomainError("number of averages must be at least 1");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> scatter(averages, 1.0 / averages);
    std::vector<double> psd = spectrum.psd();
    for (double& v : psd) v = (v + floor) * scatter(rng);
    return Spectrum(spectrum.grid(), std::move(psd), spectrum.meta());
}

}  // namespace mirrorsim
