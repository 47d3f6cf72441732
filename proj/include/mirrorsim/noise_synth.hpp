#pragma once

// Thermal displacement noise seen by the probe beam.
//
// Conventions: the single-mode function of displacement_psd_angular() is the
// two-sided spectrum per rad/s,
//   S(Omega) = 2 Phi Omega_n^2 k_B T / (Omega M_eff) /
//              ((Omega_n^2 - Omega^2)^2 + Phi^2 Omega_n^4),
// normalised so that integral S dOmega / 2pi over both signs of Omega gives
// k_B T / (M_eff Omega_n^2). A Spectrum stores the one-sided density per Hz,
// 2 S(2 pi f), whose integral over f >= 0 gives the same variance.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mirrorsim/model_core.hpp"

namespace mirrorsim {

struct FrequencyGrid {
    double f_start = 0.0;  // Hz
    double f_step = 0.0;   // Hz
    std::size_t count = 0;

    static FrequencyGrid from_range(double f_min, double f_max, double f_step);
    double at(std::size_t i) const { return f_start + f_step * static_cast<double>(i); }
    double f_end() const { return at(count - 1); }
    void validate() const;
};

struct SpectrumMeta {
    std::optional<double> rbw;          // Hz, set by apply_rbw
    std::vector<std::string> mirrors;   // catalog labels summed into the spectrum
};

class Spectrum {
public:
    Spectrum(FrequencyGrid grid, std::vector<double> psd, SpectrumMeta meta = {});

    const FrequencyGrid& grid() const { return grid_; }
    const std::vector<double>& psd() const { return psd_; }
    const SpectrumMeta& meta() const { return meta_; }
    std::size_t size() const { return psd_.size(); }
    double frequency(std::size_t i) const { return grid_.at(i); }
    double asd(std::size_t i) const;

    // Sum of S * df over the grid (m^2).
    double total_power() const;

private:
    FrequencyGrid grid_;
    std::vector<double> psd_;
    SpectrumMeta meta_;
};

// chi_n(Omega) = 1 / (M_n (Omega_n^2 - Omega^2 - i Phi_n Omega_n^2))
std::complex<double> susceptibility(const Mode& mode, double omega);

// Fluctuation-dissipation force spectrum -(2 k_B T / Omega) Im(1/chi_n).
double langevin_psd(const Mode& mode, const Environment& env, double omega);

// <u_n, v0^2>: overlap of the face shape with the normalised beam intensity.
double beam_overlap(const SurfaceShape& shape, const OpticalBeam& beam);

struct EffectiveMass {
    double kg = 0.0;        // +inf when the beam does not couple to the mode
    double overlap = 0.0;
    bool decoupled = false;
    std::string diagnostic;
};

// M_eff = M_n / |<u_n, v0^2>|^2
EffectiveMass effective_mass(const Mode& mode, const OpticalBeam& beam);

double displacement_psd_angular(const Mode& mode, double effective_mass, const Environment& env,
                                double omega);

struct MirrorCatalog {
    std::string label;
    std::vector<Mode> modes;
};

// Incoherent sum over all modes of all catalogs (one-sided, m^2/Hz).
Spectrum displacement_psd(std::span<const MirrorCatalog> mirrors, const OpticalBeam& beam,
                          const Environment& env, const FrequencyGrid& grid);
Spectrum displacement_psd(std::span<const Mode> modes, const OpticalBeam& beam,
                          const Environment& env, const FrequencyGrid& grid);

// psi = 4 pi u / lambda
double phase_shift(double displacement, double wavelength);

// Frequency-modulation calibration: delta_u = L delta_nu / nu.
double calibrate_displacement(double delta_nu, double nu, double cavity_length);

// Spectrum-analyzer resolution bandwidth: convolution with a gaussian window
// whose equivalent noise bandwidth is `rbw`. Power is redistributed bin by
// bin, so the total is conserved exactly.
Spectrum apply_rbw(const Spectrum& spectrum, double rbw);

// Measurement noise for fit testing: adds a white floor and scales every bin
// by the mean of `averages` exponential variates (averaged periodogram
// statistics). Deterministic for a given seed.
Spectrum add_measurement_noise(const Spectrum& spectrum, double floor, int averages, std::uint64_t seed);

}  // namespace mirrorsim
