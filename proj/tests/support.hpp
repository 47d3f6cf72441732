#pragma once

// Test-only helpers: simple shapes, frozen reference values and independent
// oracles (boost special functions and quadrature, never the library's own
// routines).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/laguerre.hpp>

#include "mirrorsim/model_core.hpp"

namespace testing {

using namespace mirrorsim;

// u = 1 over the whole face: overlap with any beam on the face is ~1.
class UniformShape : public SeparableShape {
public:
    explicit UniformShape(double radius) : radius_(radius) {}
    double radial(double) const override { return 1.0; }
    double face_radius() const override { return radius_; }
    int azimuthal_order() const override { return 0; }

private:
    double radius_;
};

inline Mode simple_mode(double f_hz, double q, double mass, double radius = 12.7e-3, ModeIndex idx = CylIndex{0, 0, 1}) {
    return Mode(idx, 2.0 * kPi * f_hz, 1.0 / q, mass, std::make_shared<UniformShape>(radius));
}

inline PlanoConvexGeometry mirror_a() { return PlanoConvexGeometry(25.4e-3, 150e-3, 2.65e-3); }
inline PlanoConvexGeometry mirror_b() { return PlanoConvexGeometry(25.4e-3, 180e-3, 1.55e-3); }
inline CylinderGeometry table_cylinder() { return CylinderGeometry(12.7e-3, 6.35e-3); }

// Values computed outside this code base (scipy / mpmath scripts).
namespace frozen {
inline constexpr double f_a_100_khz = 1171.139384;
inline constexpr double f_b_400_khz = 7746.903445;
inline constexpr double gap_b_khz = 56.170602;
inline constexpr double w1_mm = 5.799590;
inline constexpr double w2_mm = 4.100929;
inline constexpr double w_b4_mm = 2.029911;
inline constexpr double h_a_10mm_mm = 2.31629547;
inline constexpr double cavity_waist_um = 62.528003;
inline constexpr double langevin_example = 5.204924e-22;
inline constexpr double psi_example = 1.551404e-10;
inline constexpr double delta_u_example = 4.350009e-15;
inline constexpr double force_400mw = 2.668513e-9;
inline constexpr double rbw_peak_ratio = 0.025749;
inline constexpr double mass_a1_mg = 150.744066;
inline constexpr double mass_a2_mg = 76.191072;
inline constexpr double flat_mass_a1_mg = 154.011446;
inline constexpr double flat_mass_a2_mg = 77.005723;
inline constexpr double cylinder_rho_v_g = 7.078703;
}  // namespace frozen

// Independent Laguerre evaluation.
inline double oracle_laguerre(int p, int l, double x) {
    return boost::math::laguerre(static_cast<unsigned>(p), static_cast<unsigned>(l), x);
}

// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double oracle_integral(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline std::filesystem::path temp_dir(const std::string& name) {
    const char* base = std::getenv("MIRRORSIM_TEST_TMP");
    std::filesystem::path dir = base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "mirrorsim_tests";
    dir /= name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
