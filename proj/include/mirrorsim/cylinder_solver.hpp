#pragma once

// Free vibrations of a traction-free isotropic cylinder by the Rayleigh-Ritz
// method.
//
// Displacements are expanded per circumferential order n as
//   u_r = U(r,z) cos(n theta),  u_theta = V(r,z) sin(n theta),
//   u_z = W(r,z) cos(n theta)
// (the sin branch is a rigid rotation of this one and is not emitted). Each
// (n, z-parity) block is a symmetric generalized eigenproblem K x = w^2 M x
// over the polynomial basis
//   (r/a)^k P_i(2 (r/a)^2 - 1) P_j(2 z / h),
// with k chosen per component so every trial field is smooth on the axis.
// The z origin is the mid-plane; the coated face is z = +h/2.
//
// The n = 0 torsional family (u_theta only) is available through
// solve_block() for rigid-body bookkeeping but carries no longitudinal
// displacement and never appears in a mode catalog.

#include <vector>

#include <Eigen/Dense>

#include "mirrorsim/model_core.hpp"

namespace mirrorsim {

struct RitzConfig {
    int basis_order = 10;                 // N_b: radial terms; z degree up to N_b + 1
    int max_circumferential_order = 4;
    double f_min = 1.0e3;                 // Hz
    double f_max = 500.0e3;               // Hz
    int quadrature_order = 0;             // 0 = automatic (always >= 2 N_b)
    double convergence_tolerance = 2e-3;  // relative shift between N_b and N_b + 2
    bool check_convergence = true;
    double loss_angle = 1e-4;             // assigned to every emitted mode

    void validate() const;
};

struct BlockKey {
    int n = 0;
    int parity = 0;          // 0: u_z odd in z, 1: u_z even in z
    bool torsional = false;  // n = 0 u_theta-only family
    auto operator<=>(const BlockKey&) const = default;
};

struct BlockSolution {
    BlockKey key;
    int basis_order = 0;
    Eigen::VectorXd omega_squared;  // ascending, rigid modes included
    Eigen::MatrixXd vectors;        // columns normalised to x^T (rho M) x = 1
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;           // integral of u.u dV (density not included)
};

BlockSolution solve_block(const CylinderGeometry& geom, const Material& mat, BlockKey key,
                          int basis_order, int quadrature_order = 0);

// Displacement field described by Ritz coefficients of one block.
class CylinderField {
public:
    struct Components {
        double U = 0.0;
        double V = 0.0;
        double W = 0.0;
    };

    CylinderField(const CylinderGeometry& geom, BlockKey key, int basis_order,
                  Eigen::VectorXd coefficients);

    const CylinderGeometry& geometry() const { return geom_; }
    BlockKey key() const { return key_; }
    int basis_order() const { return basis_order_; }
    const Eigen::VectorXd& coefficients() const { return coefficients_; }

    // Amplitudes (U, V, W) at (r, z); the theta factors are implied by the
    // block.
    Components evaluate(double r, double z) const;

    // W on a face: front is z = +h/2 (coated), back is z = -h/2.
    double face_w(double r, bool front) const;

    // Coefficients c_i of W(r, h/2) = (r/a)^n sum_i c_i P_i(2 (r/a)^2 - 1).
    std::vector<double> front_face_series() const;

private:
    CylinderGeometry geom_;
    BlockKey key_;
    int basis_order_;
    Eigen::VectorXd coefficients_;
};

struct CylinderMode {
    Mode mode;
    CylinderField field;
};

// Number of zero-frequency (rigid-body) solutions over all blocks up to
// max_n, counting the degenerate sin branch of n >= 1 blocks. A free body has
// six: two in-plane translations, axial translation, two tilts, spin.
int rigid_body_mode_count(const CylinderGeometry& geom, const Material& mat, int basis_order,
                          int max_n = 3);

// Elastic modes with frequency in [cfg.f_min, cfg.f_max], ascending.
std::vector<CylinderMode> solve_cylinder(const CylinderGeometry& geom, const Material& mat,
                                         const RitzConfig& cfg);
std::vector<Mode> solve_modes(const CylinderGeometry& geom, const Material& mat,
                              const RitzConfig& cfg);

// Outward-normal displacement of both faces on a polar grid
// (index i * n_theta + j, r_i = i * a / (n_r - 1), theta_j = 2 pi j / n_theta).
struct FaceDisplacements {
    double radius = 0.0;
    int n_r = 0;
    int n_theta = 0;
    std::vector<double> front;
    std::vector<double> back;
};

FaceDisplacements sample_faces(const CylinderField& field, int n_r = 24, int n_theta = 32);

// n from the dominant azimuthal Fourier order, xi from the sign of the
// front/back correlation; `order` is the frequency rank inside (n, xi).
CylIndex classify(const FaceDisplacements& faces, int order, double purity_tolerance = 1e-6);

// rho * integral |u|^2 dV with u scaled so that max |u_z| on the coated face
// is 1.
double modal_mass(const CylinderField& field, const Material& mat, const CylinderGeometry& geom);

// Face shape of a cylinder mode: normalised W(r, h/2) cos(n theta).
class CylinderFaceShape : public SeparableShape {
public:
    CylinderFaceShape(double radius, int n, std::vector<double> series);
    double radial(double r) const override;
    double face_radius() const override { return radius_; }
    int azimuthal_order() const override { return n_; }

private:
    double raw(double r) const;

    double radius_;
    int n_;
    std::vector<double> series_;
    double scale_ = 1.0;
};

}  // namespace mirrorsim
