#include "mirrorsim/quadrature.hpp"

#include <cmath>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {

GaussRule gauss_legendre(int order, double a, double b) {
    if (order < 1) throw DomainError("Gauss-Legendre order must be at least 1");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_order.
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[order - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[order - 1 - i] = half * w;
    }
    return rule;
}

double integrate_disk(const std::function<double(Point2)>& f, Point2 center, double radius,
                      int n_radial, int n_angular) {
    const GaussRule radial = gauss_legendre(n_radial, 0.0, radius);
    const double dtheta = 2.0 * kPi / n_angular;
    double sum = 0.0;
    for (int i = 0; i < n_radial; ++i) {
        const double r = radial.nodes[i];
        double ring = 0.0;
        // Uniform rule in angle: exact for trigonometric polynomials of
        // degree < n_angular.
        for (int j = 0; j < n_angular; ++j) {
            const double t = (j + 0.5) * dtheta;
            ring += f({center.x + r * std::cos(t), center.y + r * std::sin(t)});
        }
        sum += radial.weights[i] * r * ring * dtheta;
    }
    return sum;
}

}  // namespace mirrorsim
