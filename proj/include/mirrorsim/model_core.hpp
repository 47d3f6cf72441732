#pragma once

// Shared physical types: materials, substrate geometries, probe beam,
// environment and the Mode record emitted by both eigenmode solvers.
//
// All quantities are SI. Unit conversion (mm, kHz, ...) happens in the CLI.

#include <compare>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mirrorsim {

inline constexpr double kPi = 3.14159265358979323846;

// CODATA 2018 exact values.
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Isotropic elastic solid.
class Material {
public:
    static Material from_lame(std::string name, double density, double lambda, double mu);
    static Material from_young(std::string name, double density, double young, double poisson);

    // Built-in copy of data/materials/fused_silica.mat. E is chosen so that
    // c_l = 5960 m/s; this is a fit to the plano-convex fundamental, not a
    // measured constant.
    static Material fused_silica();

    const std::string& name() const { return name_; }
    double density() const { return density_; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }
    double longitudinal_velocity() const { return c_l_; }
    double shear_velocity() const;
    double young_modulus() const;
    double poisson_ratio() const;

private:
    Material(std::string name, double density, double lambda, double mu);

    std::string name_;
    double density_;
    double lambda_;
    double mu_;
    double c_l_;
};

// c_l = sqrt((lambda + 2 mu) / rho)
double longitudinal_velocity(const Material& material);
double longitudinal_velocity(double density, double lambda, double mu);

class CylinderGeometry {
public:
    CylinderGeometry(double radius, double thickness);
    double radius() const { return radius_; }
    double thickness() const { return thickness_; }
    double volume() const;
    CylinderGeometry scaled(double factor) const;

private:
    double radius_;
    double thickness_;
};

// Flat coated face at z = 0, spherical convex back of radius R, thickness h0
// on axis.
class PlanoConvexGeometry {
public:
    // Ratio R/h0 above which the paraxial gaussian-mode model is accepted.
    static constexpr double kParaxialRatio = 20.0;

    PlanoConvexGeometry(double diameter, double curvature_radius, double center_thickness);

    double diameter() const { return diameter_; }
    double face_radius() const { return 0.5 * diameter_; }
    double curvature_radius() const { return curvature_radius_; }
    double center_thickness() const { return center_thickness_; }
    bool paraxial() const { return curvature_radius_ / center_thickness_ >= kParaxialRatio; }

private:
    double diameter_;
    double curvature_radius_;
    double center_thickness_;
};

double sagitta(const PlanoConvexGeometry& geom, double r);
// h(r) = h0 - (R - sqrt(R^2 - r^2)), 0 <= r <= d/2.
double thickness_at(const PlanoConvexGeometry& geom, double r);

class OpticalBeam {
public:
    OpticalBeam(double waist, double wavelength, Point2 center = {});
    double waist() const { return waist_; }
    double wavelength() const { return wavelength_; }
    Point2 center() const { return center_; }
    OpticalBeam recentered(Point2 center) const { return OpticalBeam(waist_, wavelength_, center); }

private:
    double waist_;
    double wavelength_;
    Point2 center_;
};

// Normalized intensity v0^2(r) = 2/(pi w0^2) exp(-2|r - c|^2 / w0^2); unit
// integral over the plane.
double beam_intensity(const OpticalBeam& beam, Point2 position);

// Waist on the flat mirror of a plano-concave cavity of length L and
// coupler curvature R_c: w0^2 = (lambda/pi) sqrt(L (R_c - L)).
double cavity_waist(double length, double coupler_radius, double wavelength);

class Environment {
public:
    explicit Environment(double temperature = 300.0);
    double temperature() const { return temperature_; }
    static constexpr double boltzmann() { return kBoltzmann; }
    static constexpr double speed_of_light() { return kSpeedOfLight; }
    double thermal_energy() const { return kBoltzmann * temperature_; }

private:
    double temperature_;
};

// ---------------------------------------------------------------------------
// Mode indices

// Cylinder classification: circumferential order n, face parity xi
// (0: both faces move outward together, 1: opposite), order number m.
struct CylIndex {
    int n = 0;
    int parity = 0;
    int order = 1;
    auto operator<=>(const CylIndex&) const = default;
};

// Plano-convex gaussian mode: overtone n >= 1, radial p, azimuthal l.
struct GaussIndex {
    int n = 1;
    int p = 0;
    int l = 0;
    int transverse_order() const { return 2 * p + l; }
    auto operator<=>(const GaussIndex&) const = default;
};

using ModeIndex = std::variant<CylIndex, GaussIndex>;

std::string family_tag(const ModeIndex& index);  // "cyl" / "gauss"
std::string to_string(const ModeIndex& index);   // "cyl 0 1 3"

// ---------------------------------------------------------------------------
// Surface shapes

// Normalized longitudinal displacement of the coated face, in polar
// coordinates centred on the mirror axis. max |u| over the face is 1.
class SurfaceShape {
public:
    virtual ~SurfaceShape() = default;
    virtual double value(double r, double theta) const = 0;
    virtual double face_radius() const = 0;
    // k such that the shape is R(r) cos(k theta); -1 when not separable.
    virtual int azimuthal_order() const = 0;

    // Cartesian sampler; zero outside the face.
    double at(Point2 p) const;
};

// Shape of the form R(r) cos(k theta).
class SeparableShape : public SurfaceShape {
public:
    double value(double r, double theta) const override;
    virtual double radial(double r) const = 0;
};

// Locates max_r |f(r)| on [0, radius] by dense sampling and Brent
// refinement; returns the signed value at the maximiser.
double radial_extremum(const std::function<double(double)>& f, double radius);

// Shape tabulated on a regular polar grid: r_i = i * radius / (n_r - 1),
// theta_j = 2 pi j / n_theta, values stored r-major (index i * n_theta + j).
// Cubic (Catmull-Rom) interpolation in both directions, periodic in theta.
class PolarGridShape : public SurfaceShape {
public:
    PolarGridShape(double radius, int n_r, int n_theta, std::vector<double> values,
                   int azimuthal_order = -1);

    static std::shared_ptr<const PolarGridShape> sample(const SurfaceShape& shape, int n_r,
                                                        int n_theta);

    double value(double r, double theta) const override;
    double face_radius() const override { return radius_; }
    int azimuthal_order() const override { return azimuthal_order_; }

    int n_r() const { return n_r_; }
    int n_theta() const { return n_theta_; }
    const std::vector<double>& values() const { return values_; }

private:
    double node(int i, int j) const;

    double radius_;
    int n_r_;
    int n_theta_;
    std::vector<double> values_;
    int azimuthal_order_;
};

// ---------------------------------------------------------------------------
// Mode

class Mode {
public:
    Mode(ModeIndex index, double omega, double loss_angle, double mass,
         std::shared_ptr<const SurfaceShape> shape);

    const ModeIndex& index() const { return index_; }
    double omega() const { return omega_; }
    double frequency_hz() const { return omega_ / (2.0 * kPi); }
    double loss_angle() const { return loss_angle_; }
    double damping_rate() const { return loss_angle_ * omega_; }
    double quality_factor() const { return 1.0 / loss_angle_; }
    double mass() const { return mass_; }
    const SurfaceShape& shape() const { return *shape_; }
    const std::shared_ptr<const SurfaceShape>& shape_ptr() const { return shape_; }

    Mode with_loss_angle(double loss_angle) const;
    Mode with_omega(double omega) const;

private:
    ModeIndex index_;
    double omega_;
    double loss_angle_;
    double mass_;
    std::shared_ptr<const SurfaceShape> shape_;
};

}  // namespace mirrorsim
