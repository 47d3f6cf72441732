#pragma once

#include <functional>
#include <vector>

#include "mirrorsim/model_core.hpp"

namespace mirrorsim {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule with `order` points on [a, b]; exact for polynomials of
// degree 2 * order - 1.
GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

// Integral of f over the disk of the given centre and radius, tensor-product
// rule in polar coordinates about that centre.
double integrate_disk(const std::function<double(Point2)>& f, Point2 center, double radius,
                      int n_radial = 64, int n_angular = 128);

}  // namespace mirrorsim
