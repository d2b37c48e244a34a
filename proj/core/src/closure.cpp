#include "graspctl/closure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "graspctl/simplex.hpp"

namespace graspctl {

GraspMatrix::GraspMatrix(int n_contacts) : n_(n_contacts), e_(static_cast<std::size_t>(6 * 4 * n_contacts), 0.0) {}

Wrench GraspMatrix::apply(const std::vector<ContactForce4>& f) const {
    if (static_cast<int>(f.size()) != n_) throw std::invalid_argument("force stack size does not match contact count");
    std::array<double, 6> w{};
    for (int r = 0; r < 6; ++r) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) {
            const auto fi = f[static_cast<std::size_t>(i)].as_array();
            for (int k = 0; k < 4; ++k) s += (*this)(r, 4 * i + k) * fi[static_cast<std::size_t>(k)];
        }
        w[static_cast<std::size_t>(r)] = s;
    }
    return {{w[0], w[1], w[2]}, {w[3], w[4], w[5]}};
}

GraspMatrix build_grasp_matrix(const std::vector<Contact>& contacts) {
    if (contacts.empty()) throw std::invalid_argument("grasp matrix needs at least one contact");
    GraspMatrix g(static_cast<int>(contacts.size()));
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        const Contact& c = contacts[i];
        for (int k = 0; k < 4; ++k) {
            ContactForce4 unit;
            (k == 0 ? unit.fx : k == 1 ? unit.fy : k == 2 ? unit.fz : unit.f_tau) = 1.0;
            const auto col = adjoint_transform(c.position, c.rotation, wrench_basis_apply(unit)).as_array();
            for (int r = 0; r < 6; ++r) g(r, 4 * static_cast<int>(i) + k) = col[static_cast<std::size_t>(r)];
        }
    }
    return g;
}

std::array<double, 6> singular_values(const GraspMatrix& g) {
    // One-sided Jacobi on the columns of G^T (6 columns of length 4n).
    const int len = g.cols();
    std::vector<std::array<double, 6>> a(static_cast<std::size_t>(len));
    for (int r = 0; r < len; ++r)
        for (int c = 0; c < 6; ++c) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = g(c, r);

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < 5; ++i) {
            for (int j = i + 1; j < 6; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (const auto& row : a) {
                    alpha += row[i] * row[i];
                    beta += row[j] * row[j];
                    gamma += row[i] * row[j];
                }
                if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (auto& row : a) {
                    const double ai = row[i], aj = row[j];
                    row[i] = c * ai - s * aj;
                    row[j] = s * ai + c * aj;
                }
            }
        }
        if (!rotated) break;
    }
    std::array<double, 6> sv{};
    for (int c = 0; c < 6; ++c) {
        double s = 0.0;
        for (const auto& row : a) s += row[c] * row[c];
        sv[static_cast<std::size_t>(c)] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

bool in_friction_cone(const ContactForce4& f, double mu, double mu_tau, double margin) {
    return std::hypot(f.fx, f.fy) <= mu * f.fz - margin && std::abs(f.f_tau) <= mu_tau * f.fz - margin && f.fz >= margin;
}

std::vector<HalfSpace> linearize_cone(double mu, double mu_tau, int sides) {
    if (sides < 3) throw std::invalid_argument("cone linearization needs at least 3 sides");
    if (!(mu >= 0.0) || !(mu_tau >= 0.0) || !std::isfinite(mu) || !std::isfinite(mu_tau))
        throw std::invalid_argument("friction coefficients must be finite and >= 0");
    std::vector<HalfSpace> hs;
    hs.reserve(static_cast<std::size_t>(sides + 3));
    // Polygon with vertices on the radius-mu circle, so the faces sit at the apothem.
    const double apothem = mu * std::cos(std::numbers::pi / sides);
    for (int j = 0; j < sides; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / sides;
        hs.push_back({{std::cos(phi), std::sin(phi), -apothem, 0.0}});
    }
    hs.push_back({{0.0, 0.0, -mu_tau, 1.0}});
    hs.push_back({{0.0, 0.0, -mu_tau, -1.0}});
    hs.push_back({{0.0, 0.0, -1.0, 0.0}});
    return hs;
}

ClosureReport is_force_closure(const std::vector<Contact>& contacts, int sides) {
    const GraspMatrix g = build_grasp_matrix(contacts);
    ClosureReport rep;
    rep.singular_values = singular_values(g);
    rep.surjective = rep.singular_values[0] > 0.0 && rep.singular_values[5] > kRankTolerance * rep.singular_values[0];

    // Variables: stacked f (4n, free) then t (free). maximize t.
    const int n = g.contacts();
    const int nf = 4 * n;
    LinearProgram lp(nf + 1);
    std::fill(lp.free_variable.begin(), lp.free_variable.end(), true);
    lp.objective[static_cast<std::size_t>(nf)] = 1.0;
    for (int r = 0; r < 6; ++r) {
        std::vector<double> a(static_cast<std::size_t>(nf + 1), 0.0);
        for (int c = 0; c < nf; ++c) a[static_cast<std::size_t>(c)] = g(r, c);
        lp.add_row(std::move(a), RowSense::Equal, 0.0);
    }
    std::vector<double> sum_fz(static_cast<std::size_t>(nf + 1), 0.0);
    for (int i = 0; i < n; ++i) {
        const Contact& c = contacts[static_cast<std::size_t>(i)];
        for (const HalfSpace& h : linearize_cone(c.mu, c.mu_tau, sides)) {
            std::vector<double> a(static_cast<std::size_t>(nf + 1), 0.0);
            for (int k = 0; k < 4; ++k) a[static_cast<std::size_t>(4 * i + k)] = h.a[static_cast<std::size_t>(k)];
            a[static_cast<std::size_t>(nf)] = 1.0;
            lp.add_row(std::move(a), RowSense::LessEqual, 0.0);
        }
        sum_fz[static_cast<std::size_t>(4 * i + 2)] = 1.0;
    }
    lp.add_row(std::move(sum_fz), RowSense::LessEqual, 1.0);

    const LpResult res = solve_lp(lp);
    if (res.status == LpStatus::Optimal && res.objective > 1e-12) {
        rep.has_strict_internal = true;
        rep.margin = res.objective;
        std::vector<ContactForce4> f(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto* x = &res.x[static_cast<std::size_t>(4 * i)];
            f[static_cast<std::size_t>(i)] = {x[0], x[1], x[2], x[3]};
        }
        rep.internal_force = std::move(f);
    }
    rep.is_force_closure = rep.surjective && rep.has_strict_internal;
    return rep;
}

bool resistance_oracle(const std::vector<Contact>& contacts, int wrench_samples, std::uint64_t seed, int sides) {
    if (wrench_samples < 1) throw std::invalid_argument("wrench_samples must be >= 1");
    if (sides < 3) throw std::invalid_argument("cone linearization needs at least 3 sides");
    const GraspMatrix g = build_grasp_matrix(contacts);

    // Extreme rays of each prism cone: polygon vertices at radius mu, torsion at +/- mu_tau, fz = 1.
    std::vector<std::array<double, 6>> rays;
    for (int i = 0; i < g.contacts(); ++i) {
        const Contact& c = contacts[static_cast<std::size_t>(i)];
        for (int j = 0; j < sides; ++j) {
            const double th = 2.0 * std::numbers::pi * j / sides + std::numbers::pi / sides;
            for (double ts : {1.0, -1.0}) {
                const std::array<double, 4> gen{c.mu * std::cos(th), c.mu * std::sin(th), 1.0, ts * c.mu_tau};
                std::array<double, 6> w{};
                for (int r = 0; r < 6; ++r)
                    for (int k = 0; k < 4; ++k) w[static_cast<std::size_t>(r)] += g(r, 4 * i + k) * gen[static_cast<std::size_t>(k)];
                rays.push_back(w);
            }
        }
    }
    const int nr = static_cast<int>(rays.size());
    constexpr double kNormalBound = 1e6;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < wrench_samples; ++s) {
        std::array<double, 6> w{};
        double nrm = 0.0;
        do {
            for (double& v : w) v = gauss(rng);
            nrm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        } while (nrm < 1e-12);

        LinearProgram lp(nr);
        for (int r = 0; r < 6; ++r) {
            std::vector<double> a(static_cast<std::size_t>(nr));
            for (int k = 0; k < nr; ++k) a[static_cast<std::size_t>(k)] = rays[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
            lp.add_row(std::move(a), RowSense::Equal, -w[static_cast<std::size_t>(r)] / nrm);
        }
        lp.add_row(std::vector<double>(static_cast<std::size_t>(nr), 1.0), RowSense::LessEqual, kNormalBound);
        if (solve_lp(lp).status != LpStatus::Optimal) return false;
    }
    return true;
}

}  // namespace graspctl
