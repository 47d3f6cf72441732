#include "mirrorsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "mirrorsim/errors.hpp"
#include "mirrorsim/gaussian_solver.hpp"

namespace mirrorsim {

namespace {

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

// Full width at half height above `base`, linearly interpolated; falls back
// to one bin when the peak is unresolved.
double half_max_width(const std::vector<double>& s, std::size_t lo, std::size_t hi, std::size_t peak,
                      double base, double df) {
    const double half = base + 0.5 * (s[peak] - base);
    double left = static_cast<double>(lo), right = static_cast<double>(hi - 1);
    for (std::size_t j = peak; j > lo; --j)
        if (s[j - 1] < half) {
            left = static_cast<double>(j - 1) + (half - s[j - 1]) / (s[j] - s[j - 1]);
            break;
        }
    for (std::size_t j = peak; j + 1 < hi; ++j)
        if (s[j + 1] < half) {
            right = static_cast<double>(j) + (s[j] - half) / (s[j] - s[j + 1]);
            break;
        }
    return std::max(right - left, 1.0) * df;
}

}  // namespace

// ---------------------------------------------------------------------------
// Peak detection

std::vector<PeakWindow> detect_peaks(const Spectrum& spectrum, double prominence) {
    if (!(prominence > 1.0)) throw DomainError("peak prominence threshold must exceed 1");
    const auto& s = spectrum.psd();
    const std::size_t n = s.size();
    if (n < 3) return {};
    const double level = prominence * median(s);

    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(s[i] > level && s[i] > s[i - 1] && s[i] >= s[i + 1])) continue;
        if (!peaks.empty()) {
            // Ripple on one resonance: the dip never falls to half the lower maximum.
            const std::size_t prev = peaks.back();
            const double dip = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(prev),
                                                 s.begin() + static_cast<std::ptrdiff_t>(i));
            if (i - prev <= 3 || dip > 0.5 * std::min(s[i], s[prev])) {
                if (s[i] > s[prev]) peaks.back() = i;
                continue;
            }
        }
        peaks.push_back(i);
    }

    std::vector<PeakWindow> windows;
    const double df = spectrum.grid().f_step;
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const std::size_t p = peaks[k];
        // Boundaries at the deepest bin between neighbouring peaks.
        std::size_t lo = 0, hi = n;
        if (k > 0) lo = static_cast<std::size_t>(
            std::min_element(s.begin() + static_cast<std::ptrdiff_t>(peaks[k - 1]),
                             s.begin() + static_cast<std::ptrdiff_t>(p)) - s.begin());
        if (k + 1 < peaks.size()) hi = static_cast<std::size_t>(
            std::min_element(s.begin() + static_cast<std::ptrdiff_t>(p),
                             s.begin() + static_cast<std::ptrdiff_t>(peaks[k + 1])) - s.begin()) + 1;
        const double base = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(lo),
                                              s.begin() + static_cast<std::ptrdiff_t>(hi));
        const double fwhm_bins = half_max_width(s, lo, hi, p, base, df) / df;
        const auto reach = static_cast<std::size_t>(std::ceil(std::max(25.0 * fwhm_bins, 8.0)));
        PeakWindow w;
        w.peak = p;
        w.begin = std::max(lo, p > reach ? p - reach : 0);
        w.end = std::min(hi, p + reach + 1);
        windows.push_back(w);
    }
    return windows;
}

// ---------------------------------------------------------------------------
// Lorentzian fit

namespace {

struct PeakModel {
    double f0, fwhm0, q0, a0, scale;

    double omega_n(const Eigen::VectorXd& x) const { return 2.0 * kPi * (f0 + x[0] * fwhm0); }
    double quality(const Eigen::VectorXd& x) const { return q0 * std::exp(x[1]); }
    double area(const Eigen::VectorXd& x) const { return a0 * std::exp(x[2]); }
    double floor(const Eigen::VectorXd& x) const { return x[3] * scale; }

    // One-sided PSD per Hz of one oscillator with variance `area`.
    double operator()(const Eigen::VectorXd& x, double f) const {
        const double wn = omega_n(x), w = 2.0 * kPi * f, phi = 1.0 / quality(x);
        const double wn2 = wn * wn, det = (wn - w) * (wn + w);
        return floor(x) + area(x) * 4.0 * phi * wn2 * wn2 / (w * (det * det + phi * phi * wn2 * wn2));
    }
};

struct PeakResidual {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const PeakModel* model;
    std::vector<double> f, s, weight;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(f.size()); }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
        for (std::size_t i = 0; i < f.size(); ++i)
            r[static_cast<Eigen::Index>(i)] = ((*model)(x, f[i]) - s[i]) * weight[i];
        return 0;
    }
};

}  // namespace

PeakFit fit_lorentzian(const Spectrum& spectrum, const PeakWindow& window, const Environment& env) {
    if (window.end > spectrum.size() || window.begin >= window.end || window.peak < window.begin ||
        window.peak >= window.end)
        throw DomainError("peak window does not lie inside the spectrum");
    const std::size_t m = window.end - window.begin;
    if (m < 8) throw FitError("peak window holds fewer than 8 bins");

    const auto& s = spectrum.psd();
    const double df = spectrum.grid().f_step;
    const double peak = s[window.peak];
    if (!(peak > 0.0)) throw FitError("peak window holds no signal");
    const double base = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(window.begin),
                                          s.begin() + static_cast<std::ptrdiff_t>(window.end));

    PeakModel model{};
    model.f0 = spectrum.frequency(window.peak);
    model.fwhm0 = half_max_width(s, window.begin, window.end, window.peak, base, df);
    model.q0 = model.f0 / model.fwhm0;
    model.a0 = (peak - base) * 2.0 * kPi * model.f0 / (4.0 * model.q0);
    model.scale = peak;
    if (!(model.a0 > 0.0)) throw FitError("peak does not rise above the window floor");

    PeakResidual residual;
    residual.model = &model;
    for (std::size_t i = window.begin; i < window.end; ++i) {
        residual.f.push_back(spectrum.frequency(i));
        residual.s.push_back(s[i]);
        residual.weight.push_back(1.0 / std::max(s[i], 1e-9 * peak));
    }

    Eigen::VectorXd x(4);
    x << 0.0, 0.0, 0.0, base / peak;
    Eigen::NumericalDiff<PeakResidual, Eigen::Central> diff(residual);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<PeakResidual, Eigen::Central>> lm(diff);
    lm.parameters.maxfev = 4000;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-12;
    const auto status = lm.minimize(x);
    using namespace Eigen::LevenbergMarquardtSpace;
    if (status == ImproperInputParameters || status == TooManyFunctionEvaluation || !x.allFinite())
        throw FitError("lorentzian fit did not converge");

    PeakFit fit;
    fit.frequency = model.omega_n(x) / (2.0 * kPi);
    fit.quality_factor = model.quality(x);
    fit.linewidth = fit.frequency / fit.quality_factor;
    fit.area = model.area(x);
    fit.floor = model.floor(x);

    std::ostringstream why;
    if (fit.quality_factor < 10.0 || fit.quality_factor > 1e8)
        why << "fitted Q = " << fit.quality_factor << " lies outside [10, 1e8]";
    else if (fit.frequency < residual.f.front() || fit.frequency > residual.f.back())
        why << "fitted centre " << fit.frequency << " Hz left the window";
    else if (fit.linewidth < 0.5 * df)
        why << "fitted linewidth " << fit.linewidth << " Hz is below half a grid bin";
    else if (4.0 * fit.area * fit.quality_factor / model.omega_n(x) < 2.0 * std::abs(fit.floor))
        why << "no peak stands above the floor";
    if (!why.str().empty()) throw FitError(why.str());

    Eigen::VectorXd r(static_cast<Eigen::Index>(m));
    residual(x, r);
    fit.residual_norm = std::sqrt(r.squaredNorm() / static_cast<double>(m));

    // Same relative measure for the best constant level alone.
    double sw = 0.0, sw2 = 0.0;
    for (double v : residual.s) {
        const double w = 1.0 / std::max(v, 1e-9 * peak);
        sw += w;
        sw2 += w * w;
    }
    const double level = sw / sw2;
    double flat = 0.0;
    for (double v : residual.s) flat += std::pow((level - v) / std::max(v, 1e-9 * peak), 2);
    flat = std::sqrt(flat / static_cast<double>(m));
    if (fit.residual_norm > 0.5 * flat)
        throw FitError("oscillator model is not significant: residual " + std::to_string(fit.residual_norm) +
                       " against " + std::to_string(flat) + " for a flat level");

    Eigen::MatrixXd jac(static_cast<Eigen::Index>(m), 4);
    diff.df(x, jac);
    const double s2 = m > 4 ? r.squaredNorm() / static_cast<double>(m - 4) : 0.0;
    const Eigen::MatrixXd cov = (jac.transpose() * jac).ldlt().solve(Eigen::MatrixXd::Identity(4, 4)) * s2;
    fit.sigma_frequency = std::sqrt(std::max(0.0, cov(0, 0))) * model.fwhm0;
    fit.sigma_quality = fit.quality_factor * std::sqrt(std::max(0.0, cov(1, 1)));
    fit.sigma_area = fit.area * std::sqrt(std::max(0.0, cov(2, 2)));

    const double omega = 2.0 * kPi * fit.frequency;
    fit.effective_mass = env.thermal_energy() / (fit.area * omega * omega);

    double sum = 0.0;
    for (std::size_t i = window.begin; i < window.end; ++i) sum += s[i] - fit.floor;
    const double hwhm = 0.5 * fit.linewidth;
    const double left = fit.frequency - (residual.f.front() - 0.5 * df);
    const double right = (residual.f.back() + 0.5 * df) - fit.frequency;
    const auto tail = [&](double d) { return fit.area / kPi * (0.5 * kPi - std::atan(d / hwhm)); };
    fit.integrated_area = sum * df + tail(left) + tail(right);
    return fit;
}

// ---------------------------------------------------------------------------
// Ringdown

RingdownFit ringdown_q(std::span<const double> time, std::span<const double> amplitude, double frequency) {
    if (time.size() != amplitude.size()) throw DomainError("ringdown time and amplitude lengths differ");
    if (time.size() < 3) throw DomainError("ringdown record needs at least 3 samples");
    if (!(frequency > 0.0)) throw DomainError("ringdown needs a positive mode frequency");
    const std::size_t n = time.size();
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(amplitude[i] > 0.0)) throw DomainError("ringdown amplitudes must be positive");
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design(static_cast<Eigen::Index>(i), 1) = time[i] - time[0];
        y[static_cast<Eigen::Index>(i)] = std::log(amplitude[i]);
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd res = y - design * coef;
    const double span = time[n - 1] - time[0];
    const double slope = coef[1];
    const double decay = -slope * span;  // total log-amplitude drop over the record
    RingdownFit fit;
    fit.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(n));
    if (!(decay > 1e-6)) throw FitError("ringdown record shows no decay");
    if (fit.residual_rms > 0.1 * decay)
        throw FitError("ringdown envelope is not monotone within the noise bound");
    fit.gamma = -2.0 * slope;
    fit.quality_factor = 2.0 * kPi * frequency / fit.gamma;
    fit.amplitude0 = std::exp(coef[0]);
    if (n > 2) {
        const double s2 = res.squaredNorm() / static_cast<double>(n - 2);
        const Eigen::Matrix2d cov = (design.transpose() * design).inverse() * s2;
        fit.sigma_quality = fit.quality_factor * std::sqrt(cov(1, 1)) / std::abs(slope);
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Labeling

ModeAssignment label_modes(std::span<const double> measured_hz, std::span<const Mode> predicted,
                           double tolerance) {
    if (!(tolerance > 0.0 && tolerance <= 0.1)) throw DomainError("labeling tolerance must lie in (0, 0.1]");
    struct Candidate {
        double error, mass, f_pred, f_meas;
        std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < measured_hz.size(); ++i)
        for (std::size_t j = 0; j < predicted.size(); ++j) {
            const double fm = measured_hz[i], fp = predicted[j].frequency_hz();
            const double err = std::abs(fm - fp) / fm;
            if (err <= tolerance) candidates.push_back({err, predicted[j].mass(), fp, fm, i, j});
        }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.error, a.mass, a.f_pred, a.f_meas) < std::tie(b.error, b.mass, b.f_pred, b.f_meas);
    });

    std::vector<bool> used_m(measured_hz.size(), false), used_p(predicted.size(), false);
    ModeAssignment out;
    for (const Candidate& c : candidates) {
        if (used_m[c.i] || used_p[c.j]) continue;
        used_m[c.i] = used_p[c.j] = true;
        out.pairs.push_back({c.i, c.j, c.f_meas, c.f_pred, c.error});
    }
    std::sort(out.pairs.begin(), out.pairs.end(), [](const MatchedPair& a, const MatchedPair& b) {
        return std::tie(a.predicted_hz, a.measured_hz) < std::tie(b.predicted_hz, b.measured_hz);
    });
    for (std::size_t i = 0; i < used_m.size(); ++i)
        if (!used_m[i]) out.unmatched_measured.push_back(i);
    for (std::size_t j = 0; j < used_p.size(); ++j)
        if (!used_p[j]) out.unmatched_predicted.push_back(j);
    return out;
}

ModeAssignment label_modes(std::span<const PeakFit> measured, std::span<const Mode> predicted,
                           double tolerance) {
    std::vector<double> f;
    f.reserve(measured.size());
    for (const PeakFit& p : measured) f.push_back(p.frequency);
    return label_modes(std::span<const double>(f), predicted, tolerance);
}

// ---------------------------------------------------------------------------
// Radial profiles

RadialProfile radial_profile(const ScanMap& map, int l, double node_guard, int bins) {
    if (l < 0) throw DomainError("azimuthal order must be non-negative");
    if (!(node_guard >= 0.0 && node_guard <= 1.0)) throw DomainError("node guard must lie in [0, 1]");
    if (map.points.empty()) throw DomainError("scan map is empty");
    if (bins <= 0) bins = std::max(1, map.lines / 2);

    // Phase reference at the strongest sample; the signed response is the
    // in-phase component.
    const auto strongest = std::max_element(map.points.begin(), map.points.end(),
                                            [](const ScanPoint& a, const ScanPoint& b) {
                                                return a.amplitude < b.amplitude;
                                            });
    const double reference = strongest->phase;

    const double a = map.mirror_radius;
    std::vector<double> sum_r(static_cast<std::size_t>(bins), 0.0), sum_v(sum_r), count(sum_r);
    for (const ScanPoint& p : map.points) {
        const double r = std::hypot(p.x, p.y);
        const double c = l == 0 ? 1.0 : std::cos(l * std::atan2(p.y, p.x));
        if (std::abs(c) < node_guard) continue;
        const auto b = std::min(bins - 1, static_cast<int>(r / a * bins));
        sum_r[b] += r;
        sum_v[b] += p.amplitude * std::cos(p.phase - reference) / c;
        count[b] += 1.0;
    }

    RadialProfile profile;
    int dropped = 0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0.0) {
            ++dropped;
            continue;
        }
        profile.points.push_back({sum_r[b] / count[b], sum_v[b] / count[b], static_cast<int>(count[b])});
    }
    if (profile.points.empty()) throw DomainError("no admissible samples: every radial bin was dropped");
    if (dropped > 0) {
        std::ostringstream os;
        os << dropped << " radial bin(s) dropped: no samples with |cos(l theta)| >= " << node_guard;
        profile.warnings.push_back(os.str());
    }
    return profile;
}

namespace {

double radial_form(int l, int p, double w, double r) {
    const double x = r / w;
    return std::pow(x, l) * laguerre(p, l, 2.0 * x * x) * std::exp(-x * x);
}

WaistFit amplitude_fit(const RadialProfile& profile, int l, int p, double w) {
    double gg = 0.0, gy = 0.0, peak = 0.0;
    for (const ProfilePoint& pt : profile.points) {
        const double g = radial_form(l, p, w, pt.r);
        gg += g * g;
        gy += g * pt.value;
        peak = std::max(peak, std::abs(pt.value));
    }
    if (!(gg > 0.0) || !(peak > 0.0)) throw FitError("radial profile carries no signal to fit");
    WaistFit fit;
    fit.waist = w;
    fit.amplitude = gy / gg;
    double ss = 0.0;
    for (const ProfilePoint& pt : profile.points) {
        const double d = pt.value - fit.amplitude * radial_form(l, p, w, pt.r);
        ss += d * d;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(profile.points.size())) / peak;
    return fit;
}

}  // namespace

WaistFit profile_residual(const RadialProfile& profile, int l, int p, double waist) {
    if (profile.points.empty()) throw DomainError("radial profile is empty");
    if (!(waist > 0.0)) throw DomainError("waist must be positive");
    return amplitude_fit(profile, l, p, waist);
}

WaistFit fit_waist(const RadialProfile& profile, int l, int p) {
    if (profile.points.empty()) throw DomainError("radial profile is empty");
    if (l < 0 || p < 0) throw DomainError("mode indices must be non-negative");
    double r_max = 0.0;
    for (const ProfilePoint& pt : profile.points) r_max = std::max(r_max, pt.r);
    if (!(r_max > 0.0)) throw FitError("radial profile spans no radius");

    // Coarse log scan, then Brent inside the best bracket.
    const auto cost = [&](double log_w) { return amplitude_fit(profile, l, p, std::exp(log_w)).rms_residual; };
    const double lo = std::log(r_max / 50.0), hi = std::log(3.0 * r_max);
    constexpr int kScan = 240;
    int best = 0;
    double best_cost = cost(lo);
    for (int k = 1; k <= kScan; ++k) {
        const double c = cost(lo + (hi - lo) * k / kScan);
        if (c < best_cost) best_cost = c, best = k;
    }
    if (best == 0 || best == kScan) throw FitError("waist fit did not converge: optimum at the search boundary");
    const double step = (hi - lo) / kScan;
    const auto [log_w, c] = boost::math::tools::brent_find_minima(cost, lo + (best - 1) * step,
                                                                   lo + (best + 1) * step, 50);
    (void)c;
    return amplitude_fit(profile, l, p, std::exp(log_w));
}

}  // namespace mirrorsim
