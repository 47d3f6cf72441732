#pragma once

// Inverse chain: spectra and scan maps back to modal parameters.

#include <span>
#include <string>
#include <vector>

#include "mirrorsim/model_core.hpp"
#include "mirrorsim/noise_synth.hpp"
#include "mirrorsim/scan_sim.hpp"

namespace mirrorsim {

struct PeakWindow {
    std::size_t begin = 0;  // first bin
    std::size_t end = 0;    // one past the last bin
    std::size_t peak = 0;   // argmax bin
};

// Local maxima above `prominence` times the median level. Neighbouring maxima
// merge unless the dip between them falls below half the lower one. Each window stops at the deepest point towards its neighbours and at
// most 25 estimated linewidths from the peak.
std::vector<PeakWindow> detect_peaks(const Spectrum& spectrum, double prominence = 10.0);

struct PeakFit {
    double frequency = 0.0;        // Hz
    double linewidth = 0.0;        // Gamma / 2 pi, Hz
    double quality_factor = 0.0;
    double area = 0.0;             // variance k_B T / (M_eff Omega^2), m^2
    double integrated_area = 0.0;  // window sum above the floor plus analytic tails, m^2
    double effective_mass = 0.0;   // kg, from `area`
    double floor = 0.0;            // m^2/Hz
    double residual_norm = 0.0;    // RMS relative residual
    double sigma_frequency = 0.0;
    double sigma_quality = 0.0;
    double sigma_area = 0.0;
};

// Least squares of one oscillator term plus a constant floor; throws FitError
// when the fit does not converge, Q leaves [10, 1e8] or no peak stands above
// the floor.
PeakFit fit_lorentzian(const Spectrum& spectrum, const PeakWindow& window, const Environment& env);

// Ringdown convention: Gamma is the energy decay rate, so the amplitude
// envelope decays as exp(-Gamma t / 2), and Q = 2 pi f / Gamma.
struct RingdownFit {
    double gamma = 0.0;  // rad/s
    double quality_factor = 0.0;
    double sigma_quality = 0.0;
    double amplitude0 = 0.0;
    double residual_rms = 0.0;  // of log amplitude
};

RingdownFit ringdown_q(std::span<const double> time, std::span<const double> amplitude, double frequency);

struct MatchedPair {
    std::size_t measured = 0;   // index into the measured list
    std::size_t predicted = 0;  // index into the predicted list
    double measured_hz = 0.0;
    double predicted_hz = 0.0;
    double relative_error = 0.0;  // |f_meas - f_pred| / f_meas
};

struct ModeAssignment {
    std::vector<MatchedPair> pairs;  // ordered by predicted frequency
    std::vector<std::size_t> unmatched_measured;
    std::vector<std::size_t> unmatched_predicted;
};

// Greedy one-to-one matching on relative error. Exact ties go to the
// predicted mode with the smaller modal mass (the more visible one), then to
// the lower frequency.
ModeAssignment label_modes(std::span<const double> measured_hz, std::span<const Mode> predicted,
                           double tolerance);
ModeAssignment label_modes(std::span<const PeakFit> measured, std::span<const Mode> predicted,
                           double tolerance);

struct ProfilePoint {
    double r = 0.0;      // mean radius of the admissible samples
    double value = 0.0;  // signed, divided by cos(l theta)
    int samples = 0;
};

struct RadialProfile {
    std::vector<ProfilePoint> points;
    std::vector<std::string> warnings;
};

// Angular average of the signed map divided by cos(l theta), using only
// samples with |cos(l theta)| >= node_guard. `bins` = 0 picks lines / 2.
RadialProfile radial_profile(const ScanMap& map, int l, double node_guard = 0.2, int bins = 0);

struct WaistFit {
    double waist = 0.0;      // m
    double amplitude = 0.0;
    double rms_residual = 0.0;  // relative to max |profile|
};

// Radial form (r/w)^l L_p^l(2 r^2/w^2) exp(-r^2/w^2) with w and the
// amplitude free.
WaistFit fit_waist(const RadialProfile& profile, int l, int p);

// Same form at a fixed waist, amplitude only.
WaistFit profile_residual(const RadialProfile& profile, int l, int p, double waist);

}  // namespace mirrorsim
