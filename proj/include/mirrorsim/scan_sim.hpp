#pragma once

// Radiation-pressure raster scan: a modulated point force applied at r0 on
// the back of the mirror, readout by the probe beam, demodulated at the drive
// frequency.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mirrorsim/model_core.hpp"

namespace mirrorsim {

// Normal-incidence reflection: F = 2 P / c.
double radiation_force(double power, const Environment& env);

// u_hat = chi(drive) F u(r0) <u, v0^2>. The drive defaults to the mode's own
// resonance when `drive_omega` is empty.
std::complex<double> response_at(const Mode& mode, const OpticalBeam& probe, Point2 r0, double force,
                                 std::optional<double> drive_omega = std::nullopt);

struct ScanConfig {
    int lines = 50;
    double speed = 5e-3;                  // m/s
    std::optional<double> drive_omega;    // rad/s, defaults to the mode frequency
    double power = 0.4;                   // W, auxiliary beam
    double spot_waist = 100e-6;           // m
    double sample_spacing = 1e-4;         // m along a line
    bool low_pass = true;                 // demodulation time constant 1/Gamma
    bool finite_spot = false;             // average u over the spot instead of point force
    bool serpentine = true;               // alternate sweep direction per line

    static constexpr double kResolutionBound = 0.5e-3;  // m
    void validate() const;
};

struct ScanPoint {
    double x = 0.0;
    double y = 0.0;
    double amplitude = 0.0;  // m
    double phase = 0.0;      // rad
};

struct ScanMap {
    std::vector<ScanPoint> points;  // in acquisition order
    double mirror_radius = 0.0;
    ModeIndex mode;
    double drive_omega = 0.0;
    int lines = 0;
    bool serpentine = true;
    double blur_length = 0.0;       // speed / Gamma, 0 without low-pass
    bool resolution_warning = false;
    std::vector<std::string> warnings;
};

ScanMap raster_scan(const Mode& mode, const OpticalBeam& probe, const ScanConfig& config,
                    const Environment& env = Environment());

// Other catalog modes whose resonance lies within 3 linewidths of the drive.
std::vector<std::string> contamination_warnings(const Mode& target, std::span<const Mode> catalog,
                                                std::optional<double> drive_omega = std::nullopt);

}  // namespace mirrorsim
