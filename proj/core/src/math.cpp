#include "graspctl/math.hpp"

#include <stdexcept>

namespace graspctl {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

bool is_finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

Mat3 Mat3::identity() {
    Mat3 r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
    return r;
}

double determinant(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

bool is_orthonormal(const Mat3& m, double tol) {
    for (double v : m.m)
        if (!std::isfinite(v)) return false;
    const Mat3 g = transpose(m) * m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) > tol) return false;
    return std::abs(determinant(m) - 1.0) <= tol;
}

Rotation3::Rotation3(const Mat3& m) : r_(m) {
    if (!is_orthonormal(m)) throw std::invalid_argument("rotation matrix is not orthonormal with det +1");
}

Rotation3 Rotation3::about_x(double a) {
    Mat3 m = Mat3::identity();
    m(1, 1) = std::cos(a);
    m(1, 2) = -std::sin(a);
    m(2, 1) = std::sin(a);
    m(2, 2) = std::cos(a);
    return {m, Unchecked{}};
}

Rotation3 Rotation3::about_y(double a) {
    Mat3 m = Mat3::identity();
    m(0, 0) = std::cos(a);
    m(0, 2) = std::sin(a);
    m(2, 0) = -std::sin(a);
    m(2, 2) = std::cos(a);
    return {m, Unchecked{}};
}

Rotation3 Rotation3::about_z(double a) {
    Mat3 m = Mat3::identity();
    m(0, 0) = std::cos(a);
    m(0, 1) = -std::sin(a);
    m(1, 0) = std::sin(a);
    m(1, 1) = std::cos(a);
    return {m, Unchecked{}};
}

Rotation3 Rotation3::from_normal(const Vec3& normal) {
    const double n = norm(normal);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("contact normal must be finite and nonzero");
    const Vec3 z = (1.0 / n) * normal;
    // Seed with the world axis least aligned with z.
    Vec3 seed{1.0, 0.0, 0.0};
    if (std::abs(z.y) < std::abs(z.x) && std::abs(z.y) <= std::abs(z.z))
        seed = {0.0, 1.0, 0.0};
    else if (std::abs(z.z) < std::abs(z.x))
        seed = {0.0, 0.0, 1.0};
    Vec3 x = cross(seed, z);
    x = (1.0 / norm(x)) * x;
    const Vec3 y = cross(z, x);
    Mat3 m;
    m(0, 0) = x.x, m(1, 0) = x.y, m(2, 0) = x.z;
    m(0, 1) = y.x, m(1, 1) = y.y, m(2, 1) = y.z;
    m(0, 2) = z.x, m(1, 2) = z.y, m(2, 2) = z.z;
    return {m, Unchecked{}};
}

Rotation3 Rotation3::operator*(const Rotation3& o) const { return {r_ * o.r_, Unchecked{}}; }

Rotation3 Rotation3::inverse() const { return {transpose(r_), Unchecked{}}; }

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m(0, 1) = -v.z;
    m(0, 2) = v.y;
    m(1, 0) = v.z;
    m(1, 2) = -v.x;
    m(2, 0) = -v.y;
    m(2, 1) = v.x;
    return m;
}

Wrench wrench_basis_apply(const ContactForce4& f) { return {{f.fx, f.fy, f.fz}, {0.0, 0.0, f.f_tau}}; }

Wrench adjoint_transform(const Vec3& p, const Rotation3& R, const Wrench& w) {
    const Vec3 f = R * w.force;
    return {f, hat(p) * f + R * w.torque};
}

Wrench adjoint_transform(const Vec3& p, const Mat3& R, const Wrench& w) {
    return adjoint_transform(p, Rotation3(R), w);
}

}  // namespace graspctl
