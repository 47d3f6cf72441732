#pragma once

// Confined (gaussian) compression modes of a plano-convex substrate in the
// paraxial limit R >> h0. Longitudinal displacement
//
//   u_npl(r, theta, z) = exp(-r^2/w_n^2) (r/w_n)^l L_p^l(2 r^2/w_n^2)
//                        cos(l theta) cos(n pi z / h(r)),
//   w_n^2 = (2 h0 / (n pi)) sqrt(R h0),
//   Omega_npl^2 = (pi c_l / h0)^2 [n^2 + (2/pi) sqrt(h0/R) n (2p + l + 1)].
//
// Only the cos(l theta) branch is represented; the sin branch is the same
// mode rotated by pi/(2l) and has the same frequency.

#include <functional>
#include <optional>
#include <vector>

#include "mirrorsim/model_core.hpp"

namespace mirrorsim {

// Generalized Laguerre polynomial L_p^l(x) by forward recurrence.
double laguerre(int p, int l, double x);

double acoustic_waist(const PlanoConvexGeometry& geom, int n);

double resonance_frequency(const PlanoConvexGeometry& geom, const Material& mat, GaussIndex idx);

// Unnormalised displacement at (r, theta, z), z measured from the flat
// face into the substrate (0 <= z <= h(r)).
double displacement(const PlanoConvexGeometry& geom, GaussIndex idx, double r, double theta, double z);

// Normalised face profile u(r, theta, 0) / max |u(., ., 0)|.
class GaussianFaceShape : public SeparableShape {
public:
    GaussianFaceShape(const PlanoConvexGeometry& geom, GaussIndex idx);
    double radial(double r) const override;
    double face_radius() const override { return radius_; }
    int azimuthal_order() const override { return index_.l; }
    // Multiply displacement() values by this to obtain the normalised shape.
    double scale() const { return scale_; }

private:
    double radius_;
    double waist_;
    GaussIndex index_;
    double scale_;
};

// rho * integral over the substrate of |u|^2 with the normalised shape
// (numerical quadrature over r and z up to the convex surface).
double modal_mass(const PlanoConvexGeometry& geom, const Material& mat, GaussIndex idx);

// Closed form rho (h0/2) (pi w_n^2 / 2) for (n, 0, 0), ignoring the
// curvature of the back face and the finite aperture.
double modal_mass_flat_estimate(const PlanoConvexGeometry& geom, const Material& mat, int n);

// Q = 350 000 for odd overtones and 650 000 for even overtones.
double default_loss_angle(GaussIndex idx);

using LossAngleFn = std::function<double(GaussIndex)>;

struct GaussianWindow {
    double f_min = 0.0;  // Hz
    double f_max = 0.0;  // Hz
    int max_transverse_order = 10;  // cap on 2p + l
};

// All (n, p, l) with frequency inside the window, ordered by
// (Omega, n, p, l).
std::vector<Mode> enumerate_modes(const PlanoConvexGeometry& geom, const Material& mat,
                                  const GaussianWindow& window, const LossAngleFn& loss = {});

Mode make_gaussian_mode(const PlanoConvexGeometry& geom, const Material& mat, GaussIndex idx,
                        std::optional<double> loss_angle = std::nullopt);

}  // namespace mirrorsim
