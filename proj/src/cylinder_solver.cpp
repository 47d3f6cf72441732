#include "mirrorsim/cylinder_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "mirrorsim/errors.hpp"
#include "mirrorsim/quadrature.hpp"

namespace mirrorsim {

void RitzConfig::validate() const {
    if (basis_order < 4) throw DomainError("Ritz basis order must be at least 4");
    if (max_circumferential_order < 0) throw DomainError("max circumferential order must be >= 0");
    if (!(f_min >= 0.0) || !(f_max > f_min)) throw DomainError("empty frequency window");
    if (quadrature_order != 0 && quadrature_order < 2 * basis_order)
        throw DomainError("quadrature order must be 0 (automatic) or >= 2 * basis order");
    if (!(convergence_tolerance > 0.0)) throw DomainError("convergence tolerance must be positive");
    if (!(loss_angle > 0.0 && loss_angle < 1.0)) throw DomainError("loss angle must lie in (0, 1)");
}

namespace {

enum class Component { U, V, W, Coupled };

struct BasisFunction {
    Component component;
    int power;     // k in (r/a)^k
    int radial;    // i in P_i(2 s^2 - 1)
    int axial;     // j in P_j(2 z / h)
};

int axial_degree(int basis_order) { return basis_order + 1; }

// Parity of u_z in z selects the block; u_r and u_theta carry the opposite
// parity.
std::vector<BasisFunction> make_basis(BlockKey key, int basis_order) {
    std::vector<BasisFunction> basis;
    const int nz = axial_degree(basis_order);
    const int w_parity = key.parity == 0 ? 1 : 0;  // j mod 2 for W terms
    const int uv_parity = 1 - w_parity;
    auto for_j = [&](int parity, auto&& fn) {
        for (int j = 0; j <= nz; ++j)
            if (j % 2 == parity) fn(j);
    };

    if (key.torsional) {
        // Parity 0 holds the rigid rotation (V = r, even in z).
        const int v_parity = key.parity == 0 ? 0 : 1;
        for (int i = 0; i < basis_order; ++i)
            for_j(v_parity, [&](int j) { basis.push_back({Component::V, 1, i, j}); });
        return basis;
    }
    const int n = key.n;
    if (n == 0) {
        for (int i = 0; i < basis_order; ++i) {
            for_j(uv_parity, [&](int j) { basis.push_back({Component::U, 1, i, j}); });
            for_j(w_parity, [&](int j) { basis.push_back({Component::W, 0, i, j}); });
        }
        return basis;
    }
    // u_x + i u_y regularity: U - V ~ r^(n-1), U + V ~ r^(n+1).
    for_j(uv_parity, [&](int j) { basis.push_back({Component::Coupled, n - 1, 0, j}); });
    for (int i = 0; i < basis_order; ++i) {
        for_j(uv_parity, [&](int j) {
            basis.push_back({Component::U, n + 1, i, j});
            basis.push_back({Component::V, n + 1, i, j});
        });
        for_j(w_parity, [&](int j) { basis.push_back({Component::W, n, i, j}); });
    }
    return basis;
}

void legendre_table(int degree, double x, std::vector<double>& p, std::vector<double>& dp) {
    p.assign(degree + 1, 0.0);
    dp.assign(degree + 1, 0.0);
    p[0] = 1.0;
    if (degree >= 1) {
        p[1] = x;
        dp[1] = 1.0;
    }
    for (int k = 2; k <= degree; ++k) {
        p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
        dp[k] = dp[k - 2] + (2.0 * k - 1.0) * p[k - 1];
    }
}

// Values and first derivatives of every basis function at one point.
struct PointValues {
    double U, V, W;
    double Ur, Uz, Vr, Vz, Wr, Wz;
};

class BasisEvaluator {
public:
    BasisEvaluator(const CylinderGeometry& geom, BlockKey key, int basis_order)
        : a_(geom.radius()), h_(geom.thickness()), key_(key), basis_order_(basis_order),
          basis_(make_basis(key, basis_order)) {}

    const std::vector<BasisFunction>& basis() const { return basis_; }

    void evaluate(double r, double z, std::vector<PointValues>& out) const {
        const double s = r / a_;
        const double zeta = 2.0 * z / h_;
        legendre_table(basis_order_, 2.0 * s * s - 1.0, pr_, dpr_);
        legendre_table(axial_degree(basis_order_), zeta, pz_, dpz_);
        out.resize(basis_.size());
        for (std::size_t b = 0; b < basis_.size(); ++b) {
            const BasisFunction& f = basis_[b];
            const double sk = f.power == 0 ? 1.0 : std::pow(s, f.power);
            const double dsk = f.power == 0 ? 0.0 : f.power * std::pow(s, f.power - 1);
            const double g = sk * pr_[f.radial];
            const double dg = (dsk * pr_[f.radial] + sk * dpr_[f.radial] * 4.0 * s) / a_;
            const double zz = pz_[f.axial];
            const double dzz = dpz_[f.axial] * 2.0 / h_;
            PointValues v{};
            const double val = g * zz, dr = dg * zz, dz = g * dzz;
            switch (f.component) {
                case Component::U: v.U = val; v.Ur = dr; v.Uz = dz; break;
                case Component::V: v.V = val; v.Vr = dr; v.Vz = dz; break;
                case Component::W: v.W = val; v.Wr = dr; v.Wz = dz; break;
                case Component::Coupled:
                    v.U = val; v.Ur = dr; v.Uz = dz;
                    v.V = -val; v.Vr = -dr; v.Vz = -dz;
                    break;
            }
            out[b] = v;
        }
    }

private:
    double a_, h_;
    BlockKey key_;
    int basis_order_;
    std::vector<BasisFunction> basis_;
    mutable std::vector<double> pr_, dpr_, pz_, dpz_;
};

// Azimuthal integrals of cos^2 and sin^2 for the block.
std::pair<double, double> theta_factors(BlockKey key) {
    if (key.torsional) return {0.0, 2.0 * kPi};
    if (key.n == 0) return {2.0 * kPi, 0.0};
    return {kPi, kPi};
}

std::pair<int, int> quadrature_points(BlockKey key, int basis_order, int requested) {
    const int nr = std::max(requested, key.n + 2 * basis_order + 4);
    const int nz = std::max(requested, axial_degree(basis_order) + 2);
    return {nr, nz};
}

}  // namespace

BlockSolution solve_block(const CylinderGeometry& geom, const Material& mat, BlockKey key,
                          int basis_order, int quadrature_order) {
    if (basis_order < 1) throw DomainError("basis order must be positive");
    if (key.torsional && key.n != 0) throw DomainError("torsional family exists only for n = 0");
    const BasisEvaluator eval(geom, key, basis_order);
    const int nb = static_cast<int>(eval.basis().size());
    const auto [nr, nz] = quadrature_points(key, basis_order, quadrature_order);
    const GaussRule rr = gauss_legendre(nr, 0.0, geom.radius());
    const GaussRule rz = gauss_legendre(nz, -0.5 * geom.thickness(), 0.5 * geom.thickness());
    const int nq = nr * nz;

    // Rows: quadrature points scaled by sqrt(weight); columns: basis.
    Eigen::MatrixXd err(nq, nb), ett(nq, nb), ezz(nq, nb), grz(nq, nb), grt(nq, nb), gtz(nq, nb);
    Eigen::MatrixXd uu(nq, nb), vv(nq, nb), ww(nq, nb);
    const double n = key.n;
    std::vector<PointValues> pv;
    for (int i = 0; i < nr; ++i) {
        const double r = rr.nodes[i];
        for (int j = 0; j < nz; ++j) {
            const int q = i * nz + j;
            const double sw = std::sqrt(rr.weights[i] * rz.weights[j] * r);
            eval.evaluate(r, rz.nodes[j], pv);
            for (int b = 0; b < nb; ++b) {
                const PointValues& v = pv[b];
                err(q, b) = sw * v.Ur;
                ett(q, b) = sw * (v.U + n * v.V) / r;
                ezz(q, b) = sw * v.Wz;
                grz(q, b) = sw * (v.Uz + v.Wr);
                grt(q, b) = sw * (-n * v.U / r + v.Vr - v.V / r);
                gtz(q, b) = sw * (v.Vz - n * v.W / r);
                uu(q, b) = sw * v.U;
                vv(q, b) = sw * v.V;
                ww(q, b) = sw * v.W;
            }
        }
    }

    const auto [c, s] = theta_factors(key);
    const double lambda = mat.lambda();
    const double mu = mat.mu();
    const Eigen::MatrixXd trace = err + ett + ezz;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
    if (c != 0.0) {
        K.noalias() += c * lambda * trace.transpose() * trace;
        K.noalias() += c * 2.0 * mu *
                       (err.transpose() * err + ett.transpose() * ett + ezz.transpose() * ezz);
        K.noalias() += c * mu * grz.transpose() * grz;
        M.noalias() += c * (uu.transpose() * uu + ww.transpose() * ww);
    }
    if (s != 0.0) {
        K.noalias() += s * mu * (grt.transpose() * grt + gtz.transpose() * gtz);
        M.noalias() += s * vv.transpose() * vv;
    }
    K = 0.5 * (K + K.transpose()).eval();
    M = 0.5 * (M + M.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, mat.density() * M);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "generalized eigensolver failed for block n=" << key.n << " parity=" << key.parity;
        throw ConvergenceError(os.str());
    }
    return BlockSolution{key, basis_order, solver.eigenvalues(), solver.eigenvectors(), std::move(K),
                         std::move(M)};
}

// ---------------------------------------------------------------------------
// Field

CylinderField::CylinderField(const CylinderGeometry& geom, BlockKey key, int basis_order,
                             Eigen::VectorXd coefficients)
    : geom_(geom), key_(key), basis_order_(basis_order), coefficients_(std::move(coefficients)) {
    if (coefficients_.size() != static_cast<Eigen::Index>(make_basis(key, basis_order).size()))
        throw DomainError("coefficient vector does not match the block basis");
}

CylinderField::Components CylinderField::evaluate(double r, double z) const {
    const BasisEvaluator eval(geom_, key_, basis_order_);
    std::vector<PointValues> pv;
    eval.evaluate(r, z, pv);
    Components out;
    for (std::size_t b = 0; b < pv.size(); ++b) {
        const double c = coefficients_[static_cast<Eigen::Index>(b)];
        out.U += c * pv[b].U;
        out.V += c * pv[b].V;
        out.W += c * pv[b].W;
    }
    return out;
}

double CylinderField::face_w(double r, bool front) const {
    const double h = geom_.thickness();
    return evaluate(r, front ? 0.5 * h : -0.5 * h).W;
}

std::vector<double> CylinderField::front_face_series() const {
    std::vector<double> series(basis_order_, 0.0);
    const auto basis = make_basis(key_, basis_order_);
    for (std::size_t b = 0; b < basis.size(); ++b)
        if (basis[b].component == Component::W)
            series[basis[b].radial] += coefficients_[static_cast<Eigen::Index>(b)];  // P_j(1) = 1
    return series;
}

// ---------------------------------------------------------------------------
// Face shape

CylinderFaceShape::CylinderFaceShape(double radius, int n, std::vector<double> series)
    : radius_(radius), n_(n), series_(std::move(series)) {
    const double extremum = radial_extremum([this](double r) { return raw(r); }, radius_);
    if (!(std::abs(extremum) > 0.0))
        throw ClassificationError("mode has no longitudinal displacement on the coated face");
    scale_ = 1.0 / extremum;
}

double CylinderFaceShape::raw(double r) const {
    const double s = r / radius_;
    const double x = 2.0 * s * s - 1.0;
    double p0 = 1.0, p1 = x;
    double sum = series_.empty() ? 0.0 : series_[0];
    for (std::size_t i = 1; i < series_.size(); ++i) {
        if (i >= 2) {
            const double k = static_cast<double>(i);
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        sum += series_[i] * p1;
    }
    return n_ == 0 ? sum : std::pow(s, n_) * sum;
}

double CylinderFaceShape::radial(double r) const { return scale_ * raw(r); }

// ---------------------------------------------------------------------------
// Classification and mass

FaceDisplacements sample_faces(const CylinderField& field, int n_r, int n_theta) {
    FaceDisplacements faces;
    faces.radius = field.geometry().radius();
    faces.n_r = n_r;
    faces.n_theta = n_theta;
    faces.front.resize(static_cast<std::size_t>(n_r) * n_theta);
    faces.back.resize(faces.front.size());
    const int n = field.key().torsional ? 0 : field.key().n;
    for (int i = 0; i < n_r; ++i) {
        const double r = faces.radius * i / (n_r - 1);
        const double wf = field.key().torsional ? 0.0 : field.face_w(r, true);
        const double wb = field.key().torsional ? 0.0 : field.face_w(r, false);
        for (int j = 0; j < n_theta; ++j) {
            const double c = std::cos(n * 2.0 * kPi * j / n_theta);
            faces.front[static_cast<std::size_t>(i) * n_theta + j] = wf * c;
            faces.back[static_cast<std::size_t>(i) * n_theta + j] = -wb * c;  // outward is -z
        }
    }
    return faces;
}

CylIndex classify(const FaceDisplacements& faces, int order, double purity_tolerance) {
    if (faces.n_r < 2 || faces.n_theta < 4 ||
        faces.front.size() != static_cast<std::size_t>(faces.n_r) * faces.n_theta ||
        faces.back.size() != faces.front.size())
        throw ClassificationError("face sample grid is inconsistent");

    const int kmax = faces.n_theta / 2;
    std::vector<double> power(kmax + 1, 0.0);
    double total = 0.0;
    for (const auto* face : {&faces.front, &faces.back}) {
        for (int i = 0; i < faces.n_r; ++i) {
            for (int k = 0; k <= kmax; ++k) {
                std::complex<double> acc = 0.0;
                for (int j = 0; j < faces.n_theta; ++j)
                    acc += (*face)[static_cast<std::size_t>(i) * faces.n_theta + j] *
                           std::polar(1.0, -2.0 * kPi * k * j / faces.n_theta);
                power[k] += std::norm(acc);
            }
        }
    }
    for (double p : power) total += p;
    if (!(total > 0.0)) throw ClassificationError("face displacement vanishes; cannot classify");
    const auto best = std::max_element(power.begin(), power.end());
    const int n = static_cast<int>(best - power.begin());
    if (1.0 - *best / total > purity_tolerance) {
        std::ostringstream os;
        os << "mixed azimuthal content: order " << n << " carries only " << *best / total
           << " of the face energy";
        throw ClassificationError(os.str());
    }

    double cross = 0.0, ff = 0.0, bb = 0.0;
    for (std::size_t q = 0; q < faces.front.size(); ++q) {
        cross += faces.front[q] * faces.back[q];
        ff += faces.front[q] * faces.front[q];
        bb += faces.back[q] * faces.back[q];
    }
    const double corr = (ff > 0.0 && bb > 0.0) ? cross / std::sqrt(ff * bb) : 0.0;
    if (std::abs(corr) < 0.5)
        throw ClassificationError("front/back faces are neither in phase nor in opposition");
    return CylIndex{n, corr > 0.0 ? 0 : 1, order};
}

double modal_mass(const CylinderField& field, const Material& mat, const CylinderGeometry& geom) {
    if (field.key().torsional)
        throw DomainError("torsional fields have no longitudinal face displacement");
    const double face_max =
        radial_extremum([&](double r) { return field.face_w(r, true); }, geom.radius());
    if (!(std::abs(face_max) > 0.0)) throw DomainError("field has no displacement on the coated face");

    const int nb = field.basis_order();
    const GaussRule rr = gauss_legendre(field.key().n + 2 * nb + 6, 0.0, geom.radius());
    const GaussRule rz = gauss_legendre(nb + 5, -0.5 * geom.thickness(), 0.5 * geom.thickness());
    const auto [c, s] = theta_factors(field.key());
    double integral = 0.0;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i)
        for (std::size_t j = 0; j < rz.nodes.size(); ++j) {
            const auto u = field.evaluate(rr.nodes[i], rz.nodes[j]);
            integral += rr.weights[i] * rz.weights[j] * rr.nodes[i] *
                        (c * (u.U * u.U + u.W * u.W) + s * u.V * u.V);
        }
    return mat.density() * integral / (face_max * face_max);
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

// Eigenvalues below this fraction of (c_t / a)^2 are rigid-body motions.
double rigid_threshold(const CylinderGeometry& geom, const Material& mat) {
    const double scale = mat.shear_velocity() / geom.radius();
    return 1e-10 * scale * scale;
}

std::vector<int> elastic_columns(const BlockSolution& sol, double threshold) {
    std::vector<int> cols;
    for (Eigen::Index k = 0; k < sol.omega_squared.size(); ++k)
        if (sol.omega_squared[k] > threshold) cols.push_back(static_cast<int>(k));
    return cols;
}

}  // namespace

int rigid_body_mode_count(const CylinderGeometry& geom, const Material& mat, int basis_order,
                          int max_n) {
    const double threshold = rigid_threshold(geom, mat);
    int count = 0;
    auto rigid_in = [&](BlockKey key) {
        const BlockSolution sol = solve_block(geom, mat, key, basis_order);
        int c = 0;
        for (Eigen::Index k = 0; k < sol.omega_squared.size(); ++k)
            if (sol.omega_squared[k] <= threshold) ++c;
        return c;
    };
    for (int parity : {0, 1}) count += rigid_in({0, parity, true});
    for (int n = 0; n <= max_n; ++n)
        for (int parity : {0, 1}) count += (n == 0 ? 1 : 2) * rigid_in({n, parity, false});
    return count;
}

std::vector<CylinderMode> solve_cylinder(const CylinderGeometry& geom, const Material& mat,
                                         const RitzConfig& cfg) {
    cfg.validate();
    const double threshold = rigid_threshold(geom, mat);
    std::vector<CylinderMode> modes;

    for (int n = 0; n <= cfg.max_circumferential_order; ++n) {
        for (int parity : {0, 1}) {
            const BlockKey key{n, parity, false};
            const BlockSolution sol = solve_block(geom, mat, key, cfg.basis_order, cfg.quadrature_order);
            const auto cols = elastic_columns(sol, threshold);

            std::vector<double> refined;
            if (cfg.check_convergence) {
                const BlockSolution finer =
                    solve_block(geom, mat, key, cfg.basis_order + 2, cfg.quadrature_order);
                for (int k : elastic_columns(finer, threshold)) refined.push_back(finer.omega_squared[k]);
            }

            for (std::size_t rank = 0; rank < cols.size(); ++rank) {
                const double omega = std::sqrt(sol.omega_squared[cols[rank]]);
                const double f = omega / (2.0 * kPi);
                if (f < cfg.f_min) continue;
                if (f > cfg.f_max) break;
                const int order = static_cast<int>(rank) + 1;

                if (cfg.check_convergence) {
                    const double shift =
                        rank < refined.size() ? std::abs(omega / std::sqrt(refined[rank]) - 1.0) : 1.0;
                    if (shift > cfg.convergence_tolerance) {
                        std::ostringstream os;
                        os << "mode " << to_string(CylIndex{n, parity, order}) << " at " << f
                           << " Hz moved by " << 100.0 * shift << "% between basis orders "
                           << cfg.basis_order << " and " << cfg.basis_order + 2;
                        throw ConvergenceError(os.str());
                    }
                }

                CylinderField field(geom, key, cfg.basis_order, sol.vectors.col(cols[rank]));
                const CylIndex index = classify(sample_faces(field), order);
                if (index.n != n || index.parity != parity) {
                    std::ostringstream os;
                    os << "block (" << n << ", " << parity << ") produced a shape classified as "
                       << to_string(index);
                    throw ClassificationError(os.str());
                }
                auto shape =
                    std::make_shared<const CylinderFaceShape>(geom.radius(), n, field.front_face_series());
                const double mass = modal_mass(field, mat, geom);
                modes.push_back({Mode(index, omega, cfg.loss_angle, mass, std::move(shape)),
                                 std::move(field)});
            }
        }
    }
    std::sort(modes.begin(), modes.end(), [](const CylinderMode& a, const CylinderMode& b) {
        if (a.mode.omega() != b.mode.omega()) return a.mode.omega() < b.mode.omega();
        return a.mode.index() < b.mode.index();
    });
    return modes;
}

std::vector<Mode> solve_modes(const CylinderGeometry& geom, const Material& mat,
                              const RitzConfig& cfg) {
    std::vector<Mode> out;
    for (auto& m : solve_cylinder(geom, mat, cfg)) out.push_back(std::move(m.mode));
    return out;
}

}  // namespace mirrorsim
