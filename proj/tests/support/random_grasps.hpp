#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "graspctl/closure.hpp"

namespace graspctl::testing {

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v;
    double n = 0.0;
    do {
        v = {g(rng), g(rng), g(rng)};
        n = norm(v);
    } while (n < 1e-9);
    return (1.0 / n) * v;
}

// Tilts `axis` by `angle` toward a random perpendicular direction.
inline Vec3 tilt(const Vec3& axis, double angle, std::mt19937_64& rng) {
    Vec3 perp;
    do {
        const Vec3 r = random_unit(rng);
        perp = r - dot(r, axis) * axis;
    } while (norm(perp) < 1e-6);
    perp = (1.0 / norm(perp)) * perp;
    return std::cos(angle) * axis + std::sin(angle) * perp;
}

// 2 or 3 contacts on a sphere with normals pointing roughly at the center. Every fifth instance
// stacks all contacts on one point, which leaves G rank deficient while internal forces remain.
inline std::vector<Contact> random_grasp(std::mt19937_64& rng, int index) {
    std::uniform_int_distribution<int> count(2, 3);
    std::uniform_real_distribution<double> radius(0.01, 0.06);
    std::uniform_real_distribution<double> tilt_angle(0.0, 0.9);
    std::uniform_real_distribution<double> mu(0.05, 1.0);
    std::uniform_real_distribution<double> mu_tau(0.0005, 0.01);

    const int n = count(rng);
    const bool coincident = index % 5 == 4;
    std::vector<Contact> cs;
    const Vec3 shared = radius(rng) * random_unit(rng);
    for (int i = 0; i < n; ++i) {
        Contact c;
        Vec3 normal;
        if (coincident) {
            c.position = shared;
            normal = i % 2 == 0 ? random_unit(rng) : -1.0 * (cs.back().rotation * Vec3{0, 0, 1});
            normal = tilt(normal, 0.3 * tilt_angle(rng), rng);
        } else {
            c.position = radius(rng) * random_unit(rng);
            normal = tilt((-1.0 / norm(c.position)) * c.position, tilt_angle(rng), rng);
        }
        c.rotation = Rotation3::from_normal(normal);
        c.mu = mu(rng);
        c.mu_tau = mu_tau(rng);
        cs.push_back(c);
    }
    return cs;
}

}  // namespace graspctl::testing
