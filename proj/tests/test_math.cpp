#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <stdexcept>

#include "graspctl/math.hpp"
#include "support/random_grasps.hpp"

namespace graspctl {
namespace {

constexpr double kPi = std::numbers::pi;

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
    EXPECT_NEAR(a.x, b.x, tol);
    EXPECT_NEAR(a.y, b.y, tol);
    EXPECT_NEAR(a.z, b.z, tol);
}

void expect_wrench_near(const Wrench& a, const Wrench& b, double tol) {
    expect_vec_near(a.force, b.force, tol);
    expect_vec_near(a.torque, b.torque, tol);
}

Rotation3 random_rotation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    return Rotation3::about_z(ang(rng)) * Rotation3::about_y(ang(rng)) * Rotation3::about_x(ang(rng));
}

Wrench random_wrench(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return {{g(rng), g(rng), g(rng)}, {g(rng), g(rng), g(rng)}};
}

TEST(Hat, ZeroVectorGivesZeroMatrix) {
    const Mat3 h = hat({0, 0, 0});
    for (double v : h.m) EXPECT_EQ(v, 0.0);
}

TEST(Hat, ZCrossXIsY) {
    EXPECT_EQ((hat({0, 0, 1}) * Vec3{1, 0, 0}), (Vec3{0, 1, 0}));
}

TEST(Hat, SelfCrossVanishes) {
    const Vec3 v{1, 2, 3};
    EXPECT_EQ(hat(v) * v, (Vec3{0, 0, 0}));
}

TEST(Hat, MatchesCrossProduct) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = testing::random_unit(rng), b = testing::random_unit(rng);
        expect_vec_near(hat(a) * b, cross(a, b), 1e-15);
    }
}

TEST(WrenchBasis, NormalForceColumn) {
    const Wrench w = wrench_basis_apply({0, 0, 1, 0});
    EXPECT_EQ(w.force, (Vec3{0, 0, 1}));
    EXPECT_EQ(w.torque, (Vec3{0, 0, 0}));
}

TEST(WrenchBasis, TorsionColumn) {
    const Wrench w = wrench_basis_apply({0, 0, 0, 1});
    EXPECT_EQ(w.force, (Vec3{0, 0, 0}));
    EXPECT_EQ(w.torque, (Vec3{0, 0, 1}));
}

TEST(WrenchBasis, ZeroInput) { EXPECT_EQ(wrench_basis_apply({}), Wrench{}); }

TEST(WrenchBasis, NeverTorqueAboutTangentAxes) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Wrench w = wrench_basis_apply({g(rng), g(rng), g(rng), g(rng)});
        EXPECT_EQ(w.torque.x, 0.0);
        EXPECT_EQ(w.torque.y, 0.0);
    }
}

TEST(Adjoint, IdentityFrame) {
    const Wrench w{{1, -2, 3}, {0.4, 0.5, -0.6}};
    EXPECT_EQ(adjoint_transform({0, 0, 0}, Rotation3{}, w), w);
}

TEST(Adjoint, OffsetNormalForce) {
    const Wrench out = adjoint_transform({0, 0.03, 0}, Rotation3{}, {{0, 0, 1}, {0, 0, 0}});
    expect_vec_near(out.force, {0, 0, 1}, 1e-15);
    expect_vec_near(out.torque, {0.03, 0, 0}, 1e-15);
}

TEST(Adjoint, HalfTurnAboutZ) {
    const Wrench out = adjoint_transform({0, 0, 0}, Rotation3::about_z(kPi), {{1, 0, 0}, {0, 0, 0}});
    expect_vec_near(out.force, {-1, 0, 0}, 1e-15);
}

TEST(Adjoint, RejectsNonOrthonormalMatrix) {
    Mat3 m = Mat3::identity();
    m(0, 0) = 1.0 + 1e-6;
    EXPECT_THROW(adjoint_transform({0, 0, 0}, m, Wrench{}), std::invalid_argument);
    Mat3 reflect = Mat3::identity();
    reflect(2, 2) = -1.0;
    EXPECT_THROW(adjoint_transform({0, 0, 0}, reflect, Wrench{}), std::invalid_argument);
    EXPECT_NO_THROW(adjoint_transform({0, 0, 0}, Rotation3::about_x(0.3).matrix(), Wrench{}));
}

TEST(Adjoint, Linearity) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Vec3 p = 0.05 * testing::random_unit(rng);
        const Rotation3 r = random_rotation(rng);
        const Wrench a = random_wrench(rng), b = random_wrench(rng);
        const double s = g(rng), t = g(rng);
        const Wrench lhs = adjoint_transform(p, r, s * a + t * b);
        const Wrench rhs = s * adjoint_transform(p, r, a) + t * adjoint_transform(p, r, b);
        const auto l = lhs.as_array(), q = rhs.as_array();
        for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(l[k], q[k], 1e-12 * (1.0 + std::abs(l[k])));
    }
}

TEST(Adjoint, Composition) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        // contact -> A by (p1, r1), A -> O by (p2, r2)
        const Vec3 p1 = 0.1 * testing::random_unit(rng), p2 = 0.1 * testing::random_unit(rng);
        const Rotation3 r1 = random_rotation(rng), r2 = random_rotation(rng);
        const Wrench w = random_wrench(rng);
        const Wrench two_step = adjoint_transform(p2, r2, adjoint_transform(p1, r1, w));
        const Wrench composed = adjoint_transform(p2 + r2 * p1, r2 * r1, w);
        expect_wrench_near(two_step, composed, 1e-9);
    }
}

TEST(Rotation3, CheckedConstruction) {
    EXPECT_THROW(Rotation3(Mat3::zero()), std::invalid_argument);
    EXPECT_NO_THROW(Rotation3(Rotation3::about_y(1.0).matrix()));
}

TEST(Rotation3, FromNormalMapsLocalZ) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const Vec3 n = testing::random_unit(rng);
        const Rotation3 r = Rotation3::from_normal(3.0 * n);
        expect_vec_near(r * Vec3{0, 0, 1}, n, 1e-12);
        EXPECT_TRUE(is_orthonormal(r.matrix()));
    }
    EXPECT_THROW(Rotation3::from_normal({0, 0, 0}), std::invalid_argument);
}

TEST(Rotation3, InverseComposesToIdentity) {
    std::mt19937_64 rng(13);
    const Rotation3 r = random_rotation(rng);
    const Mat3 id = (r * r.inverse()).matrix();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(id(i, j), i == j ? 1.0 : 0.0, 1e-15);
}

}  // namespace
}  // namespace graspctl
