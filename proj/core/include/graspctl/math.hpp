#pragma once

#include <array>
#include <cmath>

namespace graspctl {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
bool is_finite(const Vec3& v);

// Row-major 3x3.
struct Mat3 {
    std::array<double, 9> m{};

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

    static Mat3 identity();
    static Mat3 zero() { return {}; }
};

Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& v);
Mat3 transpose(const Mat3& a);
double determinant(const Mat3& a);

// Proper rotation (contact frame -> object frame). Construction checks R^T R = I and det = +1.
class Rotation3 {
public:
    static constexpr double kTolerance = 1e-9;

    Rotation3() : r_(Mat3::identity()) {}
    // Throws std::invalid_argument when `m` is not a proper rotation within kTolerance.
    explicit Rotation3(const Mat3& m);

    static Rotation3 about_x(double angle);
    static Rotation3 about_y(double angle);
    static Rotation3 about_z(double angle);
    // Some rotation whose local z axis equals `normal` (normalized internally).
    static Rotation3 from_normal(const Vec3& normal);

    const Mat3& matrix() const { return r_; }
    Vec3 operator*(const Vec3& v) const { return r_ * v; }
    Rotation3 operator*(const Rotation3& o) const;
    Rotation3 inverse() const;

private:
    struct Unchecked {};
    Rotation3(const Mat3& m, Unchecked) : r_(m) {}
    Mat3 r_;
};

bool is_orthonormal(const Mat3& m, double tol = Rotation3::kTolerance);

struct Wrench {
    Vec3 force;
    Vec3 torque;

    friend Wrench operator+(const Wrench& a, const Wrench& b) { return {a.force + b.force, a.torque + b.torque}; }
    friend Wrench operator*(double s, const Wrench& a) { return {s * a.force, s * a.torque}; }
    friend bool operator==(const Wrench&, const Wrench&) = default;

    std::array<double, 6> as_array() const { return {force.x, force.y, force.z, torque.x, torque.y, torque.z}; }
};

// Soft-finger contact force: tangential fx, fy, normal fz (N) and torsion about the normal (N*m).
struct ContactForce4 {
    double fx = 0.0;
    double fy = 0.0;
    double fz = 0.0;
    double f_tau = 0.0;

    std::array<double, 4> as_array() const { return {fx, fy, fz, f_tau}; }
};

Mat3 hat(const Vec3& v);

Wrench wrench_basis_apply(const ContactForce4& f);

Wrench adjoint_transform(const Vec3& p, const Rotation3& R, const Wrench& w_contact);
// Overload for a raw matrix; throws std::invalid_argument if it is not orthonormal.
Wrench adjoint_transform(const Vec3& p, const Mat3& R, const Wrench& w_contact);

}  // namespace graspctl
