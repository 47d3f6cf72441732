#include "mirrorsim/gaussian_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mirrorsim/errors.hpp"
#include "mirrorsim/quadrature.hpp"

namespace mirrorsim {

namespace {

void require_paraxial(const PlanoConvexGeometry& geom) {
    if (!geom.paraxial()) {
        std::ostringstream os;
        os << "gaussian modes need R/h0 >= " << PlanoConvexGeometry::kParaxialRatio << " (R/h0 = "
           << geom.curvature_radius() / geom.center_thickness() << ")";
        throw DomainError(os.str());
    }
}

void require_index(GaussIndex idx) {
    if (idx.n < 1 || idx.p < 0 || idx.l < 0)
        throw DomainError("gaussian index needs n >= 1, p >= 0, l >= 0 (got " + to_string(idx) + ")");
}

double transverse_profile(double r, double w, int p, int l) {
    const double x = r / w;
    const double xl = l == 0 ? 1.0 : std::pow(x, l);
    return std::exp(-x * x) * xl * laguerre(p, l, 2.0 * x * x);
}

}  // namespace

double laguerre(int p, int l, double x) {
    if (p < 0 || l < 0) throw DomainError("Laguerre indices must be non-negative");
    if (p == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + l - x;
    for (int k = 1; k < p; ++k) {
        const double next = ((2.0 * k + 1.0 + l - x) * cur - (k + l) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double acoustic_waist(const PlanoConvexGeometry& geom, int n) {
    require_paraxial(geom);
    if (n < 1) throw DomainError("overtone index must be >= 1");
    const double h0 = geom.center_thickness();
    return std::sqrt(2.0 * h0 / (n * kPi) * std::sqrt(geom.curvature_radius() * h0));
}

double resonance_frequency(const PlanoConvexGeometry& geom, const Material& mat, GaussIndex idx) {
    require_paraxial(geom);
    require_index(idx);
    const double h0 = geom.center_thickness();
    const double k = kPi * mat.longitudinal_velocity() / h0;
    const double n = idx.n;
    const double bracket =
        n * n + (2.0 / kPi) * std::sqrt(h0 / geom.curvature_radius()) * n * (idx.transverse_order() + 1);
    return k * std::sqrt(bracket);
}

double displacement(const PlanoConvexGeometry& geom, GaussIndex idx, double r, double theta, double z) {
    require_index(idx);
    const double h = thickness_at(geom, r);  // throws outside the face
    if (z < 0.0 || z > h * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "z = " << z << " m is outside the substrate (0 <= z <= " << h << " m at r = " << r << ")";
        throw DomainError(os.str());
    }
    const double w = acoustic_waist(geom, idx.n);
    return transverse_profile(r, w, idx.p, idx.l) * std::cos(idx.l * theta) *
           std::cos(idx.n * kPi * z / h);
}

GaussianFaceShape::GaussianFaceShape(const PlanoConvexGeometry& geom, GaussIndex idx)
    : radius_(geom.face_radius()), waist_(acoustic_waist(geom, idx.n)), index_(idx), scale_(1.0) {
    require_index(idx);
    const double extremum = radial_extremum(
        [this](double r) { return transverse_profile(r, waist_, index_.p, index_.l); }, radius_);
    scale_ = 1.0 / extremum;
}

double GaussianFaceShape::radial(double r) const {
    return scale_ * transverse_profile(r, waist_, index_.p, index_.l);
}

double modal_mass(const PlanoConvexGeometry& geom, const Material& mat, GaussIndex idx) {
    require_paraxial(geom);
    const GaussianFaceShape shape(geom, idx);
    const double w = acoustic_waist(geom, idx.n);
    // The profile is negligible beyond ~6 w; integrate panel-wise so the
    // rule resolves the Laguerre oscillations.
    const double r_max = std::min(geom.face_radius(), 8.0 * w);
    const int panels = 16 + 2 * idx.transverse_order();
    // integral_0^1 cos^2(n pi t) dt, numerically (equals 1/2).
    const GaussRule z_rule = gauss_legendre(2 * idx.n + 16, 0.0, 1.0);
    double axial = 0.0;
    for (std::size_t j = 0; j < z_rule.nodes.size(); ++j) {
        const double c = std::cos(idx.n * kPi * z_rule.nodes[j]);
        axial += z_rule.weights[j] * c * c;
    }
    double integral = 0.0;
    for (int k = 0; k < panels; ++k) {
        const GaussRule r_rule = gauss_legendre(24, r_max * k / panels, r_max * (k + 1) / panels);
        for (std::size_t i = 0; i < r_rule.nodes.size(); ++i) {
            const double r = r_rule.nodes[i];
            const double h = thickness_at(geom, r);
            const double radial = shape.radial(r);
            integral += r_rule.weights[i] * r * radial * radial * axial * h;
        }
    }
    const double angular = idx.l == 0 ? 2.0 * kPi : kPi;
    return mat.density() * angular * integral;
}

double modal_mass_flat_estimate(const PlanoConvexGeometry& geom, const Material& mat, int n) {
    const double w = acoustic_waist(geom, n);
    return mat.density() * 0.5 * geom.center_thickness() * 0.5 * kPi * w * w;
}

double default_loss_angle(GaussIndex idx) { return idx.n % 2 == 1 ? 1.0 / 350000.0 : 1.0 / 650000.0; }

Mode make_gaussian_mode(const PlanoConvexGeometry& geom, const Material& mat, GaussIndex idx,
                        std::optional<double> loss_angle) {
    return Mode(idx, resonance_frequency(geom, mat, idx), loss_angle.value_or(default_loss_angle(idx)),
                modal_mass(geom, mat, idx), std::make_shared<const GaussianFaceShape>(geom, idx));
}

std::vector<Mode> enumerate_modes(const PlanoConvexGeometry& geom, const Material& mat,
                                  const GaussianWindow& window, const LossAngleFn& loss) {
    require_paraxial(geom);
    if (!(window.f_max > window.f_min) || window.f_min < 0.0) return {};
    const double omega_min = 2.0 * kPi * window.f_min;
    const double omega_max = 2.0 * kPi * window.f_max;

    std::vector<GaussIndex> indices;
    for (int n = 1; resonance_frequency(geom, mat, {n, 0, 0}) <= omega_max; ++n) {
        for (int order = 0; order <= window.max_transverse_order; ++order) {
            const double omega = resonance_frequency(geom, mat, {n, 0, order});
            if (omega > omega_max) break;
            if (omega < omega_min) continue;
            for (int p = 0; 2 * p <= order; ++p) indices.push_back({n, p, order - 2 * p});
        }
    }

    std::vector<Mode> modes;
    modes.reserve(indices.size());
    for (const GaussIndex& idx : indices)
        modes.push_back(make_gaussian_mode(
            geom, mat, idx, loss ? std::optional<double>(loss(idx)) : std::nullopt));
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.omega() != b.omega()) return a.omega() < b.omega();
        return std::get<GaussIndex>(a.index()) < std::get<GaussIndex>(b.index());
    });
    return modes;
}

}  // namespace mirrorsim
