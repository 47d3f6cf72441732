#include "mirrorsim/scan_sim.hpp"

#include <cmath>
#include <sstream>

#include "mirrorsim/errors.hpp"
#include "mirrorsim/noise_synth.hpp"

namespace mirrorsim {

double radiation_force(double power, const Environment& env) {
    if (!(power >= 0.0)) throw DomainError("laser power must be non-negative");
    return 2.0 * power / env.speed_of_light();
}

std::complex<double> response_at(const Mode& mode, const OpticalBeam& probe, Point2 r0, double force,
                                 std::optional<double> drive_omega) {
    const double a = mode.shape().face_radius();
    if (std::hypot(r0.x, r0.y) > a * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "force position (" << r0.x << ", " << r0.y << ") m lies outside the mirror face";
        throw DomainError(os.str());
    }
    const double omega = drive_omega.value_or(mode.omega());
    const double overlap = beam_overlap(mode.shape(), probe);
    return susceptibility(mode, omega) * force * mode.shape().at(r0) * overlap;
}

void ScanConfig::validate() const {
    if (lines < 1) throw DomainError("scan needs at least one line");
    if (!(speed > 0.0)) throw DomainError("scan speed must be positive");
    if (!(sample_spacing > 0.0)) throw DomainError("sample spacing must be positive");
    if (sample_spacing > kResolutionBound)
        throw DomainError("sample spacing exceeds the 0.5 mm resolution bound");
    if (!(power >= 0.0)) throw DomainError("laser power must be non-negative");
    if (!(spot_waist > 0.0)) throw DomainError("spot waist must be positive");
    if (drive_omega && !(*drive_omega > 0.0)) throw DomainError("drive frequency must be positive");
}

ScanMap raster_scan(const Mode& mode, const OpticalBeam& probe, const ScanConfig& config,
                    const Environment& env) {
    config.validate();
    const double a = mode.shape().face_radius();
    const double omega = config.drive_omega.value_or(mode.omega());
    const double force = radiation_force(config.power, env);
    // chi and the readout overlap are the same at every spot.
    const std::complex<double> gain = susceptibility(mode, omega) * force * beam_overlap(mode.shape(), probe);

    ScanMap map;
    map.mirror_radius = a;
    map.mode = mode.index();
    map.drive_omega = omega;
    map.lines = config.lines;
    map.serpentine = config.serpentine;

    const double gamma = mode.damping_rate();
    double alpha = 1.0;
    if (config.low_pass) {
        map.blur_length = config.speed / gamma;
        alpha = -std::expm1(-config.sample_spacing / config.speed * gamma);
        if (map.blur_length > ScanConfig::kResolutionBound) {
            map.resolution_warning = true;
            std::ostringstream os;
            os << "low-pass blur " << map.blur_length * 1e3 << " mm exceeds the 0.5 mm resolution bound";
            map.warnings.push_back(os.str());
        }
    }

    const auto shape_at = [&](Point2 p) {
        if (!config.finite_spot) return mode.shape().at(p);
        return beam_overlap(mode.shape(), OpticalBeam(config.spot_waist, probe.wavelength(), p));
    };

    const double edge = a * (1.0 - 1e-12);
    for (int k = 0; k < config.lines; ++k) {
        const double y = -a + (k + 0.5) * 2.0 * a / config.lines;
        const double half = std::sqrt(std::max(0.0, edge * edge - y * y));
        const int count = std::max(2, static_cast<int>(std::ceil(2.0 * half / config.sample_spacing)) + 1);
        const bool reverse = config.serpentine && (k % 2 == 1);
        std::complex<double> state;
        for (int i = 0; i < count; ++i) {
            const int s = reverse ? count - 1 - i : i;
            const double x = -half + 2.0 * half * s / (count - 1);
            const std::complex<double> target = gain * shape_at({x, y});
            state = (i == 0) ? target : state + alpha * (target - state);
            map.points.push_back({x, y, std::abs(state), std::arg(state)});
        }
    }
    return map;
}

std::vector<std::string> contamination_warnings(const Mode& target, std::span<const Mode> catalog,
                                                std::optional<double> drive_omega) {
    const double omega = drive_omega.value_or(target.omega());
    std::vector<std::string> out;
    for (const Mode& other : catalog) {
        if (other.index() == target.index()) continue;
        const double width = std::max(other.damping_rate(), target.damping_rate());
        if (std::abs(other.omega() - omega) < 3.0 * width) {
            std::ostringstream os;
            os << "mode " << to_string(other.index()) << " at " << other.frequency_hz() * 1e-3
               << " kHz lies within 3 linewidths of the drive and is not included in the map";
            out.push_back(os.str());
        }
    }
    return out;
}

}  // namespace mirrorsim
