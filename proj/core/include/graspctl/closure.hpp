#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "graspctl/math.hpp"

namespace graspctl {

struct Contact {
    Vec3 position;        // m, object frame
    Rotation3 rotation;   // contact frame -> object frame; local z is the inward normal
    double mu = 0.5;
    double mu_tau = 0.005;  // m
};

// Dense 6 x 4n, row-major. Columns 4i..4i+3 belong to contact i.
class GraspMatrix {
public:
    explicit GraspMatrix(int n_contacts);

    int contacts() const { return n_; }
    int cols() const { return 4 * n_; }
    double operator()(int r, int c) const { return e_[static_cast<std::size_t>(r * cols() + c)]; }
    double& operator()(int r, int c) { return e_[static_cast<std::size_t>(r * cols() + c)]; }

    Wrench apply(const std::vector<ContactForce4>& f) const;

private:
    int n_;
    std::vector<double> e_;
};

// a . f <= 0 over (fx, fy, fz, f_tau).
struct HalfSpace {
    std::array<double, 4> a{};

    double eval(const ContactForce4& f) const { return a[0] * f.fx + a[1] * f.fy + a[2] * f.fz + a[3] * f.f_tau; }
};

struct ClosureReport {
    bool surjective = false;
    bool has_strict_internal = false;
    bool is_force_closure = false;
    double margin = 0.0;  // N
    std::optional<std::vector<ContactForce4>> internal_force;
    std::array<double, 6> singular_values{};  // descending
};

inline constexpr int kDefaultConeSides = 8;
inline constexpr double kRankTolerance = 1e-8;

GraspMatrix build_grasp_matrix(const std::vector<Contact>& contacts);

// Descending; zero-padded when 4n < 6.
std::array<double, 6> singular_values(const GraspMatrix& g);

bool in_friction_cone(const ContactForce4& f, double mu, double mu_tau, double margin);

// `sides` tangential faces of the inscribed polygon, two torsional faces, then fz >= 0.
std::vector<HalfSpace> linearize_cone(double mu, double mu_tau, int sides);

ClosureReport is_force_closure(const std::vector<Contact>& contacts, int sides = kDefaultConeSides);

// Brute-force check: every sampled unit wrench must be balanced by forces inside the same
// linearized cones. Uses the extreme-ray form of the cones, not the half-space form above.
bool resistance_oracle(const std::vector<Contact>& contacts, int wrench_samples, std::uint64_t seed = 0x5eed,
                       int sides = kDefaultConeSides);

}  // namespace graspctl
