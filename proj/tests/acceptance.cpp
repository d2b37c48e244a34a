// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "graspctl/closure.hpp"
#include "graspctl/controller.hpp"
#include "graspctl/harness.hpp"
#include "support/random_grasps.hpp"

namespace {

using namespace graspctl;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void displacement_ordering(const ExperimentAResult& a) {
    bool pass = a.wall_seconds <= 60.0;
    std::string detail;
    for (const ObjectSpec& o : {tape_roll(), wooden_cuboid()}) {
        const double f = a.row(o.name, ControllerKind::Force).mean_truth;
        const double j = a.row(o.name, ControllerKind::Trajectory).mean_truth;
        pass = pass && f < 0.25 * j;
        detail += fmt("%s force %.3f mm vs trajectory %.3f mm; ", o.name.c_str(), 1e3 * f, 1e3 * j);
    }
    const double wood = a.row(wooden_cuboid().name, ControllerKind::Force).mean_truth;
    pass = pass && wood <= 0.002;
    detail += fmt("90 trials in %.2f s", a.wall_seconds);
    report(1, pass, detail);
}

void detection_floor(const ExperimentAResult& a) {
    const ObjectSpec foam = styrofoam_cylinder();
    const double f = a.row(foam.name, ControllerKind::Force).mean_truth;
    const double j = a.row(foam.name, ControllerKind::Trajectory).mean_truth;
    const double rel = std::abs(f - j) / std::max(f, j);
    // Largest true single-finger contact force while the force controller is still closing.
    double peak = 0.0, threshold = 0.0;
    for (double off : ExperimentAConfig{}.offsets) {
        const ScenarioSpec s = experiment_a_scenario(foam, off, ControllerKind::Force);
        threshold = std::max(s.control.f_theta, s.control.detection_floor);
        for (const auto& row : run_trial(s).series)
            if (row.phase == Phase::Closing) peak = std::max({peak, row.true_f1, row.true_f2});
    }
    report(2, rel < 0.20 && peak < threshold,
           fmt("force %.3f mm vs trajectory %.3f mm, relative difference %.1f%%; peak closing contact force %.4f N, detection "
               "threshold %.2f N",
               1e3 * f, 1e3 * j, 100.0 * rel, peak, threshold));
}

void gravity_compensation(const ExperimentBResult& b) {
    const double base = b.run("rotation", Ablation::None).rotation_drift;
    const double off = b.run("rotation", Ablation::NoGravityComp).rotation_drift;
    report(3, base < 0.001 && off > 10.0 * base && off > 0.005,
           fmt("baseline drift %.3f mm, no_gravity_comp drift %.3f mm (%.1fx)", 1e3 * base, 1e3 * off, off / base));
}

void compliance_ceiling(const ExperimentBResult& b) {
    const auto& base = b.run("push", Ablation::None);
    const auto& rigid = b.run("push", Ablation::NoCompliance);
    const double f_goal = base.spec.control.f_goal;
    const double base_max = *std::max_element(base.push_max_total_force.begin(), base.push_max_total_force.end());
    const double rigid_max = *std::max_element(rigid.push_max_total_force.begin(), rigid.push_max_total_force.end());
    report(4, base_max <= f_goal + 0.1 && rigid_max > f_goal + 0.5,
           fmt("settled max(f1+f2): baseline %.3f N, no_compliance %.3f N (f_goal %.2f N)", base_max, rigid_max, f_goal));

    // Not part of the verdict: the same check over further noise seeds.
    int ok = 0;
    double worst = 0.0;
    const int seeds = 8;
    for (int seed = 1; seed <= seeds; ++seed) {
        ScenarioSpec s = push_scenario(Ablation::None);
        s.seed = static_cast<std::uint64_t>(seed);
        const auto r = run_trial(s);
        double m = 0.0;
        for (const Push& p : s.disturbances.pushes)
            m = std::max(m, max_true_total_force(r.series, p.t_start + p.ramp + kPushSettle, p.t_end - p.ramp));
        worst = std::max(worst, m);
        ok += m <= f_goal + 0.1;
    }
    std::printf("  info: baseline within f_goal + 0.1 N for %d of %d seeds, worst %.3f N\n", ok, seeds, worst);
}

void deadband(const ExperimentBResult& b) {
    const auto& base = b.run("push", Ablation::None);
    const auto& free = b.run("push", Ablation::NoDeadband);
    const double sustained = *std::max_element(free.post_push_sustained.begin(), free.post_push_sustained.end());
    const double drift = *std::max_element(base.post_push_drift.begin(), base.post_push_drift.end());
    const double free_drift = *std::max_element(free.post_push_drift.begin(), free.post_push_drift.end());
    report(5, sustained >= 2.0 && drift < 5e-5,
           fmt("no_deadband drift above 0.1 mm/s for %.2f s (%.3f mm); baseline post-push drift %.4f mm", sustained,
               1e3 * free_drift, 1e3 * drift));
}

void force_convergence() {
    bool pass = true;
    std::string detail;
    for (const ObjectSpec& obj : {styrofoam_cylinder(), tape_roll(), wooden_cuboid()}) {
        ScenarioSpec s;
        s.name = obj.name;
        s.object = obj;
        s.start_aperture = obj.width + 0.01;
        s.duration = 8.0;
        s.sensor.noise_sigma = 0.0;
        const auto r = run_trial(s);
        double peak = 0.0;
        for (const auto& row : r.series)
            if (row.phase == Phase::Holding) peak = std::max(peak, row.f_int);
        const double f_goal = s.control.f_goal;
        const bool ok = !r.fault && r.settle_time >= 0.0 && peak <= f_goal + 0.1;
        pass = pass && ok;
        detail += fmt("%s settles in %.2f s, peak f_int %.3f N; ", obj.name.c_str(), r.settle_time, peak);
    }
    report(6, pass, detail + "noiseless sensors");

    // Not part of the verdict: the same runs with the default sensor noise.
    std::string noisy;
    for (const ObjectSpec& obj : {styrofoam_cylinder(), tape_roll(), wooden_cuboid()}) {
        ScenarioSpec s;
        s.object = obj;
        s.start_aperture = obj.width + 0.01;
        s.duration = 8.0;
        const auto r = run_trial(s);
        noisy += fmt(" %s %.3f N", obj.name.c_str(), r.overshoot + s.control.f_goal);
    }
    std::printf("  info: peak f_int with sensor noise:%s\n", noisy.c_str());
}

std::vector<Contact> antipodal(double mu) {
    Contact a, b;
    a.position = {0, 0, 0.0225};
    a.rotation = Rotation3::from_normal({0, 0, -1});
    b.position = {0, 0, -0.0225};
    b.rotation = Rotation3::from_normal({0, 0, 1});
    a.mu = b.mu = mu;
    a.mu_tau = b.mu_tau = mu > 0.0 ? 0.005 : 0.0;
    return {a, b};
}

void closure_vs_oracle() {
    std::mt19937_64 rng(20240601);
    int compared = 0, disagreements = 0, positives = 0, all_disagreements = 0;
    for (int k = 0; k < 200; ++k) {
        const auto cs = testing::random_grasp(rng, k);
        const ClosureReport r = is_force_closure(cs);
        const bool differs = resistance_oracle(cs, 500, 7000 + static_cast<std::uint64_t>(k)) != r.is_force_closure;
        all_disagreements += differs;
        if (std::abs(r.margin) <= 1e-6) continue;
        ++compared;
        positives += r.is_force_closure;
        disagreements += differs;
    }
    Contact single = antipodal(0.5)[0];
    const bool anti = is_force_closure(antipodal(0.5)).is_force_closure;
    const bool frictionless = is_force_closure(antipodal(0.0)).is_force_closure;
    const bool one = is_force_closure({single}).is_force_closure;
    report(7, disagreements == 0 && anti && !frictionless && !one,
           fmt("%d disagreements over %d compared instances (%d closure); antipodal mu=0.5 %s, mu=0 %s, single contact %s",
               disagreements, compared, positives, anti ? "closure" : "no closure", frictionless ? "closure" : "no closure",
               one ? "closure" : "no closure"));
    std::printf("  info: %d disagreements over all 200 instances, boundary ones included\n", all_disagreements);
}

void identities() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long> dyadic(-(1L << 40), 1L << 40);
    std::normal_distribution<double> g(0.0, 1.0);
    int exact_fail = 0;
    double worst_ulps = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double ui = std::ldexp(static_cast<double>(dyadic(rng)), -50);
        const double ue = std::ldexp(static_cast<double>(dyadic(rng)), -50);
        const auto [a, b] = distribute(ui, ue);
        exact_fail += a + b != ui || b - a != ue;
        const double ri = 1e-3 * g(rng), re = 1e-3 * g(rng);
        const auto [c, d] = distribute(ri, re);
        const double scale = std::max(std::abs(ri), std::abs(re));
        const double ulp = std::nextafter(scale, 2.0 * scale) - scale;
        worst_ulps = std::max({worst_ulps, std::abs(c + d - ri) / ulp, std::abs(d - c - re) / ulp});
    }

    auto random_rotation = [&] {
        std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
        return Rotation3::about_z(ang(rng)) * Rotation3::about_y(ang(rng)) * Rotation3::about_x(ang(rng));
    };
    auto random_wrench = [&] { return Wrench{{g(rng), g(rng), g(rng)}, {g(rng), g(rng), g(rng)}}; };
    double lin = 0.0, comp = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p1 = 0.1 * testing::random_unit(rng), p2 = 0.1 * testing::random_unit(rng);
        const Rotation3 r1 = random_rotation(), r2 = random_rotation();
        const Wrench a = random_wrench(), b = random_wrench();
        const double s = g(rng), t = g(rng);
        const auto l = adjoint_transform(p1, r1, s * a + t * b).as_array();
        const auto q = (s * adjoint_transform(p1, r1, a) + t * adjoint_transform(p1, r1, b)).as_array();
        const auto x = adjoint_transform(p2, r2, adjoint_transform(p1, r1, a)).as_array();
        const auto y = adjoint_transform(p2 + r2 * p1, r2 * r1, a).as_array();
        for (std::size_t k = 0; k < 6; ++k) {
            lin = std::max(lin, std::abs(l[k] - q[k]));
            comp = std::max(comp, std::abs(x[k] - y[k]));
        }
    }

    int violations = 0, accepted = 0;
    for (double mu : {0.2, 0.5, 1.0}) {
        const double mu_tau = 0.01;
        const auto hs = linearize_cone(mu, mu_tau, kDefaultConeSides);
        std::uniform_real_distribution<double> tan(-mu, mu), tau(-mu_tau, mu_tau), fz(0.0, 1.0);
        for (int n = 0; n < 10000;) {
            const ContactForce4 f{tan(rng), tan(rng), fz(rng), tau(rng)};
            bool inside = true;
            for (const HalfSpace& h : hs) inside = inside && h.eval(f) <= 0.0;
            if (!inside) continue;
            ++n;
            ++accepted;
            violations += !in_friction_cone(f, mu, mu_tau, 0.0);
        }
    }
    report(8, exact_fail == 0 && worst_ulps <= 4.0 && lin <= 1e-9 && comp <= 1e-9 && violations == 0,
           fmt("distribute: %d inexact on dyadic inputs, worst %.1f ulp on random reals; adjoint linearity %.2e, composition "
               "%.2e; cone soundness %d violations in %d samples",
               exact_fail, worst_ulps, lin, comp, violations, accepted));
}

// Concatenated contents of every file in `dir`, in name order.
std::string directory_bytes(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out += f.filename().string() + '\n' + ss.str();
    }
    return out;
}

void determinism(const ExperimentAResult& a1, const ExperimentBResult& b1) {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "graspctl_acceptance";
    fs::remove_all(root);
    for (const char* d : {"a1", "a2", "b1", "b2"}) fs::create_directories(root / d);
    write_experiment_a(a1, (root / "a1").string());
    write_experiment_a(run_experiment_a({}), (root / "a2").string());
    write_experiment_b(b1, (root / "b1").string());
    write_experiment_b(run_experiment_b({}), (root / "b2").string());
    const bool a_same = directory_bytes(root / "a1") == directory_bytes(root / "a2");
    const bool b_same = directory_bytes(root / "b1") == directory_bytes(root / "b2");
    fs::remove_all(root);
    report(9, a_same && b_same,
           fmt("exp-a files %s, exp-b files %s", a_same ? "identical" : "differ", b_same ? "identical" : "differ"));
}

}  // namespace

int main() {
    const ExperimentAResult a = run_experiment_a({});
    const ExperimentBResult b = run_experiment_b({});
    displacement_ordering(a);
    detection_floor(a);
    gravity_compensation(b);
    compliance_ceiling(b);
    deadband(b);
    force_convergence();
    closure_vs_oracle();
    identities();
    determinism(a, b);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
