#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace randdiv {

inline constexpr int kMaxDim = 3;

// Coordinates beyond the active dimension are kept at zero so that
// Euclidean quantities can be computed without carrying d around.
using Point = std::array<double, kMaxDim>;
using Site = std::array<int, kMaxDim>;

inline double norm(const Point& x) {
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

inline Point operator-(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point operator+(const Point& a, const Point& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double distance(const Point& a, const Point& b) { return norm(a - b); }

/// Center G*j of the lattice box Λ_G(Gj).
inline Point site_center(const Site& j, double G, int dim) {
    Point c{};
    for (int k = 0; k < dim; ++k) c[k] = G * j[k];
    return c;
}

/// Membership in the open cube of side `side` centered at `center`.
inline bool in_open_box(const Point& x, const Point& center, double side, int dim) {
    for (int k = 0; k < dim; ++k)
        if (!(std::abs(x[k] - center[k]) < side / 2)) return false;
    return true;
}

/// Whether the open ball B(c, radius) lies inside the open cube centered at `center`.
inline bool ball_in_box(const Point& c, double radius, const Point& center, double side, int dim) {
    for (int k = 0; k < dim; ++k)
        if (std::abs(c[k] - center[k]) + radius > side / 2 * (1 + 1e-12)) return false;
    return true;
}

std::string to_string(const Site& j, int dim);
std::string to_string(const Point& x, int dim);

}  // namespace randdiv
