#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mirrorsim/errors.hpp"
#include "mirrorsim/gaussian_solver.hpp"
#include "mirrorsim/quadrature.hpp"
#include "support.hpp"

using namespace mirrorsim;
using namespace testing;

namespace {
const Material silica = Material::fused_silica();
double khz(const PlanoConvexGeometry& g, GaussIndex i) { return resonance_frequency(g, silica, i) / (2 * kPi) / 1e3; }
}  // namespace

TEST_CASE("frequencies match the independent evaluation and the quoted values") {
    CHECK(khz(mirror_a(), {1, 0, 0}) == doctest::Approx(frozen::f_a_100_khz).epsilon(1e-8));
    CHECK(khz(mirror_b(), {4, 0, 0}) == doctest::Approx(frozen::f_b_400_khz).epsilon(1e-8));
    const double gap = khz(mirror_b(), {4, 0, 1}) - khz(mirror_b(), {4, 0, 0});
    CHECK(gap == doctest::Approx(frozen::gap_b_khz).epsilon(1e-6));
    CHECK(rel(khz(mirror_a(), {1, 0, 0}), 1171.0) < 5e-3);
    CHECK(rel(khz(mirror_b(), {4, 0, 0}), 7747.0) < 5e-3);
    CHECK(rel(gap, 57.0) < 2e-2);
}

TEST_CASE("acoustic waists") {
    const double w1 = acoustic_waist(mirror_a(), 1), w2 = acoustic_waist(mirror_a(), 2);
    CHECK(w1 * 1e3 == doctest::Approx(frozen::w1_mm).epsilon(1e-6));
    CHECK(w2 * 1e3 == doctest::Approx(frozen::w2_mm).epsilon(1e-6));
    CHECK(acoustic_waist(mirror_b(), 4) * 1e3 == doctest::Approx(frozen::w_b4_mm).epsilon(1e-6));
    CHECK(std::abs(w1 / w2 - std::sqrt(2.0)) <= 4 * std::numeric_limits<double>::epsilon());
    CHECK(rel(w1, 5.8e-3) < 1e-2);
    CHECK(rel(w2, 4.1e-3) < 1e-2);
}

TEST_CASE("modal masses against an independent quadrature") {
    for (int n : {1, 2}) {
        const auto g = mirror_a();
        const double w2 = std::pow(acoustic_waist(g, n), 2);
        // rho 2 pi int exp(-2 r^2/w^2) h(r)/2 r dr; the axial cos^2 averages to 1/2.
        const double oracle = 2200.0 * 2 * kPi *
                              oracle_integral([&](double r) { return std::exp(-2 * r * r / w2) * thickness_at(g, r) / 2 * r; },
                                              0.0, g.face_radius());
        CHECK(modal_mass(g, silica, {n, 0, 0}) == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(modal_mass(mirror_a(), silica, {1, 0, 0}) * 1e6 == doctest::Approx(frozen::mass_a1_mg).epsilon(1e-7));
    CHECK(modal_mass(mirror_a(), silica, {2, 0, 0}) * 1e6 == doctest::Approx(frozen::mass_a2_mg).epsilon(1e-7));
    CHECK(rel(modal_mass(mirror_a(), silica, {1, 0, 0}), 153e-6) < 5e-2);
    CHECK(rel(modal_mass(mirror_a(), silica, {2, 0, 0}), 77e-6) < 5e-2);
    CHECK(modal_mass_flat_estimate(mirror_a(), silica, 1) * 1e6 == doctest::Approx(frozen::flat_mass_a1_mg).epsilon(1e-7));
    CHECK(modal_mass_flat_estimate(mirror_a(), silica, 2) * 1e6 == doctest::Approx(frozen::flat_mass_a2_mg).epsilon(1e-7));
}

TEST_CASE("higher-order masses against an independent quadrature") {
    const auto g = mirror_b();
    for (GaussIndex idx : {GaussIndex{4, 1, 3}, GaussIndex{4, 0, 2}, GaussIndex{3, 2, 0}}) {
        const double w = acoustic_waist(g, idx.n);
        const GaussianFaceShape shape(g, idx);
        const auto radial = [&](double r) {
            const double x = r / w;
            return shape.scale() * std::pow(x, idx.l) * oracle_laguerre(idx.p, idx.l, 2 * x * x) * std::exp(-x * x);
        };
        const double angular = idx.l == 0 ? 2 * kPi : kPi;
        const double oracle = 2200.0 * angular *
                              oracle_integral([&](double r) { return radial(r) * radial(r) * thickness_at(g, r) / 2 * r; },
                                              0.0, g.face_radius());
        CHECK(modal_mass(g, silica, idx) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("laguerre recurrence agrees with boost") {
    CHECK(laguerre(2, 0, 2.0) == doctest::Approx(-1.0).epsilon(1e-15));
    for (int p = 0; p <= 8; ++p)
        for (int l = 0; l <= 6; ++l)
            for (double x : {0.0, 0.3, 1.7, 4.0, 9.5, 20.0})
                CHECK(laguerre(p, l, x) == doctest::Approx(oracle_laguerre(p, l, x)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("property: equal 2p+l gives bit-identical frequencies") {
    for (int n = 1; n <= 6; ++n)
        for (int order = 0; order <= 6; ++order) {
            const double ref = resonance_frequency(mirror_b(), silica, {n, 0, order});
            for (int p = 1; 2 * p <= order; ++p) CHECK(resonance_frequency(mirror_b(), silica, {n, p, order - 2 * p}) == ref);
        }
}

TEST_CASE("property: frequency increases with n, p and l") {
    for (int n = 1; n <= 5; ++n)
        for (int p = 0; p <= 3; ++p)
            for (int l = 0; l <= 3; ++l) {
                const double f = resonance_frequency(mirror_a(), silica, {n, p, l});
                CHECK(resonance_frequency(mirror_a(), silica, {n + 1, p, l}) > f);
                CHECK(resonance_frequency(mirror_a(), silica, {n, p + 1, l}) > f);
                CHECK(resonance_frequency(mirror_a(), silica, {n, p, l + 1}) > f);
            }
}

TEST_CASE("property: face shapes at fixed n are orthogonal") {
    const auto g = mirror_b();
    std::vector<GaussIndex> set;
    for (int order = 0; order <= 4; ++order)
        for (int p = 0; 2 * p <= order; ++p) set.push_back({4, p, order - 2 * p});
    std::vector<GaussianFaceShape> shapes;
    for (auto idx : set) shapes.emplace_back(g, idx);
    for (std::size_t a = 0; a < shapes.size(); ++a)
        for (std::size_t b = a; b < shapes.size(); ++b) {
            const auto dot = [&](const GaussianFaceShape& u, const GaussianFaceShape& v) {
                return integrate_disk([&](Point2 q) { return u.at(q) * v.at(q); }, {0, 0}, g.face_radius(), 160, 96);
            };
            const double ip = dot(shapes[a], shapes[b]) / std::sqrt(dot(shapes[a], shapes[a]) * dot(shapes[b], shapes[b]));
            if (a == b) CHECK(ip == doctest::Approx(1.0));
            else CHECK(std::abs(ip) < 1e-6);
        }
}

TEST_CASE("face shape is normalised and follows the closed form") {
    const auto g = mirror_b();
    const GaussianFaceShape s(g, {4, 1, 3});
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) worst = std::max(worst, std::abs(s.radial(g.face_radius() * i / 2000.0)));
    CHECK(worst <= 1.0 + 1e-12);
    CHECK(worst > 1.0 - 1e-4);  // 2000 samples straddle the extremum
    const double r = 1.3e-3, th = 0.4;
    CHECK(s.value(r, th) == doctest::Approx(s.scale() * displacement(g, {4, 1, 3}, r, th, 0.0)).epsilon(1e-13));
    // cos(n pi z / h): the convex face moves with sign (-1)^n.
    CHECK(displacement(g, {1, 0, 0}, 0.0, 0.0, 1.55e-3) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(displacement(g, {1, 0, 0}, 0.0, 0.0, 2e-3), DomainError);
    CHECK_THROWS_AS(displacement(g, {0, 0, 0}, 0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("non-paraxial geometry is rejected") {
    const PlanoConvexGeometry stubby(25.4e-3, 40e-3, 6e-3);
    CHECK_THROWS_AS(resonance_frequency(stubby, silica, {1, 0, 0}), DomainError);
    CHECK_THROWS_AS(acoustic_waist(stubby, 1), DomainError);
}

TEST_CASE("mode enumeration windows") {
    const auto a = enumerate_modes(mirror_a(), silica, {1.0e6, 1.3e6, 10});
    REQUIRE_FALSE(a.empty());
    CHECK(a.front().index() == ModeIndex{GaussIndex{1, 0, 0}});
    CHECK(a.front().quality_factor() == doctest::Approx(350000.0));

    const auto b = enumerate_modes(mirror_b(), silica, {7.7e6, 7.95e6, 10});
    REQUIRE(b.size() == 1 + 1 + 2 + 2);  // 2p+l = 0, 1, 2, 3
    CHECK(b[0].index() == ModeIndex{GaussIndex{4, 0, 0}});
    CHECK(b[0].quality_factor() == doctest::Approx(650000.0));
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i - 1].omega() <= b[i].omega());
    CHECK(b[2].omega() == b[3].omega());
    CHECK(std::get<GaussIndex>(b[2].index()) < std::get<GaussIndex>(b[3].index()));

    CHECK(enumerate_modes(mirror_b(), silica, {1.0e3, 2.0e3, 10}).empty());
    const auto custom = enumerate_modes(mirror_b(), silica, {7.7e6, 7.75e6, 10}, [](GaussIndex) { return 1e-5; });
    CHECK(custom.at(0).loss_angle() == 1e-5);
    CHECK(default_loss_angle({3, 0, 0}) == doctest::Approx(1 / 350000.0));
    CHECK(default_loss_angle({2, 0, 0}) == doctest::Approx(1 / 650000.0));
}
