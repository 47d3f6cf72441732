#include "mirrorsim/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << what << " must be positive and finite (got " << value << ")";
        throw DomainError(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Material

Material::Material(std::string name, double density, double lambda, double mu)
    : name_(std::move(name)), density_(density), lambda_(lambda), mu_(mu),
      c_l_(mirrorsim::longitudinal_velocity(density, lambda, mu)) {
    if (!(mu > 0.0)) throw DomainError("invalid material '" + name_ + "': shear modulus mu must be positive");
}

Material Material::from_lame(std::string name, double density, double lambda, double mu) {
    return Material(std::move(name), density, lambda, mu);
}

Material Material::from_young(std::string name, double density, double young, double poisson) {
    require_positive(young, "Young's modulus");
    if (!(poisson > -1.0 && poisson < 0.5))
        throw DomainError("invalid material '" + name + "': Poisson ratio must lie in (-1, 0.5)");
    const double mu = young / (2.0 * (1.0 + poisson));
    const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    return Material(std::move(name), density, lambda, mu);
}

Material Material::fused_silica() {
    return from_young("fused_silica", 2200.0, 72.70543969156627e9, 0.17);
}

double Material::shear_velocity() const { return std::sqrt(mu_ / density_); }

double Material::young_modulus() const { return mu_ * (3.0 * lambda_ + 2.0 * mu_) / (lambda_ + mu_); }

double Material::poisson_ratio() const { return lambda_ / (2.0 * (lambda_ + mu_)); }

double longitudinal_velocity(double density, double lambda, double mu) {
    if (!(density > 0.0) || !(lambda + 2.0 * mu > 0.0) || !std::isfinite(lambda + mu))
        throw DomainError("invalid material: need rho > 0 and lambda + 2 mu > 0");
    return std::sqrt((lambda + 2.0 * mu) / density);
}

double longitudinal_velocity(const Material& material) { return material.longitudinal_velocity(); }

// ---------------------------------------------------------------------------
// Geometry

CylinderGeometry::CylinderGeometry(double radius, double thickness)
    : radius_(radius), thickness_(thickness) {
    require_positive(radius, "cylinder radius");
    require_positive(thickness, "cylinder thickness");
}

double CylinderGeometry::volume() const { return kPi * radius_ * radius_ * thickness_; }

CylinderGeometry CylinderGeometry::scaled(double factor) const {
    return CylinderGeometry(radius_ * factor, thickness_ * factor);
}

PlanoConvexGeometry::PlanoConvexGeometry(double diameter, double curvature_radius,
                                         double center_thickness)
    : diameter_(diameter), curvature_radius_(curvature_radius), center_thickness_(center_thickness) {
    require_positive(diameter, "diameter");
    require_positive(curvature_radius, "curvature radius");
    require_positive(center_thickness, "center thickness");
    if (curvature_radius <= 0.5 * diameter)
        throw DomainError("curvature radius must exceed half the diameter");
    if (sagitta(*this, face_radius()) >= center_thickness)
        throw DomainError("convex cap reaches the flat face: thickness vanishes inside the face");
}

double sagitta(const PlanoConvexGeometry& geom, double r) {
    const double R = geom.curvature_radius();
    // R - sqrt(R^2 - r^2), written to avoid cancellation.
    return r * r / (R + std::sqrt((R - r) * (R + r)));
}

double thickness_at(const PlanoConvexGeometry& geom, double r) {
    if (!(r >= 0.0) || r > geom.face_radius() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "radial position " << r << " m is outside the face (radius " << geom.face_radius() << " m)";
        throw DomainError(os.str());
    }
    return geom.center_thickness() - sagitta(geom, std::min(r, geom.face_radius()));
}

// ---------------------------------------------------------------------------
// Beam and environment

OpticalBeam::OpticalBeam(double waist, double wavelength, Point2 center)
    : waist_(waist), wavelength_(wavelength), center_(center) {
    require_positive(waist, "beam waist");
    require_positive(wavelength, "optical wavelength");
}

double beam_intensity(const OpticalBeam& beam, Point2 position) {
    const double w2 = beam.waist() * beam.waist();
    const double dx = position.x - beam.center().x;
    const double dy = position.y - beam.center().y;
    return 2.0 / (kPi * w2) * std::exp(-2.0 * (dx * dx + dy * dy) / w2);
}

double cavity_waist(double length, double coupler_radius, double wavelength) {
    require_positive(length, "cavity length");
    require_positive(wavelength, "optical wavelength");
    if (!(length < coupler_radius))
        throw DomainError("unstable cavity: length must be shorter than the coupler curvature radius");
    return std::sqrt(wavelength / kPi * std::sqrt(length * (coupler_radius - length)));
}

Environment::Environment(double temperature) : temperature_(temperature) {
    require_positive(temperature, "temperature");
}

// ---------------------------------------------------------------------------
// Indices

std::string family_tag(const ModeIndex& index) {
    return std::holds_alternative<CylIndex>(index) ? "cyl" : "gauss";
}

std::string to_string(const ModeIndex& index) {
    std::ostringstream os;
    if (const auto* c = std::get_if<CylIndex>(&index))
        os << "cyl " << c->n << ' ' << c->parity << ' ' << c->order;
    else {
        const auto& g = std::get<GaussIndex>(index);
        os << "gauss " << g.n << ' ' << g.p << ' ' << g.l;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Shapes

double SurfaceShape::at(Point2 p) const {
    const double r = std::hypot(p.x, p.y);
    if (r > face_radius()) return 0.0;
    return value(r, std::atan2(p.y, p.x));
}

double SeparableShape::value(double r, double theta) const {
    const int k = azimuthal_order();
    return k == 0 ? radial(r) : radial(r) * std::cos(k * theta);
}

double radial_extremum(const std::function<double(double)>& f, double radius) {
    constexpr int kSamples = 4000;
    int best = 0;
    double best_abs = -1.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double v = std::abs(f(radius * i / kSamples));
        if (v > best_abs) {
            best_abs = v;
            best = i;
        }
    }
    const double lo = radius * std::max(0, best - 1) / kSamples;
    const double hi = radius * std::min(kSamples, best + 1) / kSamples;
    const auto [x, fx] = boost::math::tools::brent_find_minima(
        [&](double r) { return -std::abs(f(r)); }, lo, hi, 52);
    const double candidate = f(radius * best / kSamples);
    return -fx > std::abs(candidate) ? f(x) : candidate;
}

PolarGridShape::PolarGridShape(double radius, int n_r, int n_theta, std::vector<double> values,
                               int azimuthal_order)
    : radius_(radius), n_r_(n_r), n_theta_(n_theta), values_(std::move(values)),
      azimuthal_order_(azimuthal_order) {
    require_positive(radius, "shape grid radius");
    if (n_r < 4 || n_theta < 4 || n_theta % 2 != 0)
        throw DomainError("shape grid needs n_r >= 4 and an even n_theta >= 4");
    if (values_.size() != static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta))
        throw DomainError("shape grid value count does not match n_r * n_theta");
}

std::shared_ptr<const PolarGridShape> PolarGridShape::sample(const SurfaceShape& shape, int n_r,
                                                             int n_theta) {
    std::vector<double> values(static_cast<std::size_t>(n_r) * n_theta);
    const double a = shape.face_radius();
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_theta; ++j)
            values[static_cast<std::size_t>(i) * n_theta + j] =
                shape.value(a * i / (n_r - 1), 2.0 * kPi * j / n_theta);
    return std::make_shared<const PolarGridShape>(a, n_r, n_theta, std::move(values),
                                                  shape.azimuthal_order());
}

double PolarGridShape::node(int i, int j) const {
    j = ((j % n_theta_) + n_theta_) % n_theta_;
    if (i < 0) return node(-i, j + n_theta_ / 2);  // through the axis
    if (i >= n_r_) {
        const int over = i - (n_r_ - 1);
        return node(n_r_ - 1, j) + over * (node(n_r_ - 1, j) - node(n_r_ - 2, j));
    }
    return values_[static_cast<std::size_t>(i) * n_theta_ + j];
}

namespace {

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                          t * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

double PolarGridShape::value(double r, double theta) const {
    const double dr = radius_ / (n_r_ - 1);
    const double u = std::clamp(r, 0.0, radius_) / dr;
    const int i = std::min(static_cast<int>(u), n_r_ - 2);
    const double tr = u - i;

    double t = theta / (2.0 * kPi) * n_theta_;
    t -= std::floor(t / n_theta_) * n_theta_;
    const int j = static_cast<int>(t);
    const double tt = t - j;

    double ring[4];
    for (int a = 0; a < 4; ++a) {
        const int ii = i - 1 + a;
        ring[a] = catmull_rom(node(ii, j - 1), node(ii, j), node(ii, j + 1), node(ii, j + 2), tt);
    }
    return catmull_rom(ring[0], ring[1], ring[2], ring[3], tr);
}

// ---------------------------------------------------------------------------
// Mode

Mode::Mode(ModeIndex index, double omega, double loss_angle, double mass,
           std::shared_ptr<const SurfaceShape> shape)
    : index_(index), omega_(omega), loss_angle_(loss_angle), mass_(mass), shape_(std::move(shape)) {
    require_positive(omega, "mode angular frequency");
    require_positive(mass, "modal mass");
    if (!(loss_angle > 0.0 && loss_angle < 1.0))
        throw DomainError("loss angle must lie in (0, 1) for mode " + to_string(index));
    if (!shape_) throw DomainError("mode " + to_string(index) + " has no surface shape");
}

Mode Mode::with_loss_angle(double loss_angle) const {
    return Mode(index_, omega_, loss_angle, mass_, shape_);
}

Mode Mode::with_omega(double omega) const { return Mode(index_, omega, loss_angle_, mass_, shape_); }

}  // namespace mirrorsim
