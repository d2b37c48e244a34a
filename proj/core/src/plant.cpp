#include "graspctl/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "graspctl/errors.hpp"

namespace graspctl {

void ObjectSpec::validate() const {
    auto bad = [&](const char* f, const char* what) { throw ConfigError("object." + std::string(f) + " " + what); };
    if (!(std::isfinite(mass) && mass >= 0.0)) bad("mass", "must be finite and >= 0");
    if (!(std::isfinite(width) && width > 0.0)) bad("width", "must be finite and > 0");
    if (!(std::isfinite(stiffness) && stiffness > 0.0)) bad("stiffness", "must be finite and > 0");
    if (!(std::isfinite(damping) && damping >= 0.0)) bad("damping", "must be finite and >= 0");
    if (!std::isfinite(initial_offset)) bad("initial_offset", "must be finite");
}

ObjectSpec styrofoam_cylinder() { return {"styrofoam", 0.002, 0.05, 500.0, 0.1, 0.0}; }
ObjectSpec tape_roll() { return {"tape_roll", 0.049, 0.045, 2000.0, 1.0, 0.0}; }
ObjectSpec wooden_cuboid() { return {"wood", 0.144, 0.04, 20000.0, 5.0, 0.0}; }

const char* push_target_name(PushTarget t) {
    switch (t) {
        case PushTarget::Finger1: return "finger1";
        case PushTarget::Finger2: return "finger2";
        case PushTarget::Object: return "object";
    }
    return "?";
}

double Push::force_at(double t) const {
    if (t <= t_start || t >= t_end) return 0.0;
    const double r = std::min(ramp, 0.5 * (t_end - t_start));
    if (r <= 0.0) return force;
    const double up = (t - t_start) / r;
    const double down = (t_end - t) / r;
    return force * std::clamp(std::min(up, down), 0.0, 1.0);
}

double WristProfile::angle_at(double t) const {
    if (t_end <= t_start) return t < t_start ? angle_start : angle_end;
    const double s = std::clamp((t - t_start) / (t_end - t_start), 0.0, 1.0);
    return angle_start + s * (angle_end - angle_start);
}

void DisturbanceSchedule::validate() const {
    if (!(std::isfinite(hand_stiffness) && hand_stiffness > 0.0))
        throw ConfigError("disturbances.hand_stiffness must be finite and > 0");
    if (!(std::isfinite(hand_reach) && hand_reach > 0.0))
        throw ConfigError("disturbances.hand_reach must be finite and > 0");
    for (std::size_t i = 0; i < pushes.size(); ++i) {
        const Push& p = pushes[i];
        const std::string key = "disturbances.pushes." + std::to_string(i);
        if (!(std::isfinite(p.t_start) && std::isfinite(p.t_end) && p.t_end > p.t_start))
            throw ConfigError(key + " needs finite t_start < t_end");
        if (!(std::isfinite(p.force) && p.force >= 0.0)) throw ConfigError(key + ".force must be finite and >= 0");
        if (!(std::isfinite(p.ramp) && p.ramp >= 0.0)) throw ConfigError(key + ".ramp must be finite and >= 0");
        for (std::size_t j = 0; j < i; ++j) {
            const Push& o = pushes[j];
            if (o.target == p.target && p.t_start < o.t_end && o.t_start < p.t_end)
                throw ConfigError(key + " overlaps another push on " + push_target_name(p.target));
        }
    }
    if (!(std::isfinite(wrist.t_start) && std::isfinite(wrist.t_end) && std::isfinite(wrist.angle_start) &&
          std::isfinite(wrist.angle_end)))
        throw ConfigError("disturbances.wrist fields must be finite");
}

void PlantConfig::validate() const {
    auto bad = [&](const char* f, const char* what) { throw ConfigError("plant." + std::string(f) + " " + what); };
    if (!(std::isfinite(physics_rate) && physics_rate > 0.0)) bad("physics_rate", "must be finite and > 0");
    if (substeps < 1) bad("substeps", "must be >= 1");
    if (!(servo_stiffness > 0.0)) bad("servo_stiffness", "must be > 0");
    if (!(std::isfinite(servo_time_constant) && servo_time_constant >= 0.0)) bad("servo_time_constant", "must be finite and >= 0");
    if (!(std::isfinite(max_finger_speed) && max_finger_speed > 0.0)) bad("max_finger_speed", "must be finite and > 0");
    if (!(std::isfinite(q_min) && std::isfinite(q_max) && q_min < q_max)) bad("q_min", "must be below q_max");
    if (!(std::isfinite(table_friction) && table_friction >= 0.0)) bad("table_friction", "must be finite and >= 0");
    if (!(std::isfinite(object_drag) && object_drag >= 0.0)) bad("object_drag", "must be finite and >= 0");
    if (!(std::isfinite(gravity) && gravity >= 0.0)) bad("gravity", "must be finite and >= 0");
}

double PlantState::g_dot_n(double g) const { return -g * std::sin(wrist_angle); }

ContactForces contact_forces(const PlantState& s, const ObjectSpec& o) {
    const double d1 = -s.q1 - (s.x_obj - 0.5 * o.width);
    const double d2 = (s.x_obj + 0.5 * o.width) - s.q2;
    const double d1_dot = -s.q1_dot - s.v_obj;
    const double d2_dot = s.v_obj - s.q2_dot;
    ContactForces f;
    if (d1 > 0.0) f.f1 = o.stiffness * d1 + o.damping * std::max(0.0, d1_dot);
    if (d2 > 0.0) f.f2 = o.stiffness * d2 + o.damping * std::max(0.0, d2_dot);
    f.f1 = std::max(0.0, f.f1);
    f.f2 = std::max(0.0, f.f2);
    return f;
}

PlantState initial_state(const ObjectSpec& object, double q1, double q2) {
    PlantState s;
    s.x_obj = object.initial_offset;
    s.q1 = s.q1_set = q1;
    s.q2 = s.q2_set = q2;
    return s;
}

double hand_force(double q, double q_reach, double k_h, double p_max) {
    return std::min(p_max, k_h * std::max(0.0, q - q_reach));
}

double solve_finger(double q_set, double k_srv, double q_surf, double k_o, double q_reach, double k_h, double p_max) {
    if (!std::isfinite(k_srv)) return q_set;
    const bool hand = k_h > 0.0 && p_max > 0.0;
    auto g = [&](double q) {
        const double p = hand ? hand_force(q, q_reach, k_h, p_max) : 0.0;
        return k_srv * (q - q_set) + p - k_o * std::max(0.0, q_surf - q);
    };
    // g is continuous, piecewise linear and strictly increasing; interpolate inside the bracketing piece.
    std::array<double, 3> b{q_surf, q_surf, q_surf};
    if (hand) {
        b[1] = q_reach;
        b[2] = q_reach + p_max / k_h;
    }
    std::sort(b.begin(), b.end());
    if (const double g0 = g(b[0]); g0 >= 0.0) {
        const double slope = k_srv + k_o;
        return b[0] - g0 / slope;
    }
    for (std::size_t i = 1; i < b.size(); ++i) {
        const double gi = g(b[i]);
        if (gi < 0.0) continue;
        const double gp = g(b[i - 1]);
        return b[i - 1] + (b[i] - b[i - 1]) * (-gp / (gi - gp));
    }
    return b[2] - g(b[2]) / k_srv;
}

namespace {

struct FingerSolve {
    double q1, q2, push1, push2;
};

struct HandLoad {
    double reach1, reach2, p1, p2, k_h;
};

FingerSolve solve_fingers(const PlantState& s, const ObjectSpec& o, const PlantConfig& c, const HandLoad& hl,
                          double x_obj) {
    const double p1 = s.hand_engaged1 ? hl.p1 : 0.0;
    const double p2 = s.hand_engaged2 ? hl.p2 : 0.0;
    FingerSolve r{};
    r.q1 = solve_finger(s.q1_set, c.servo_stiffness, 0.5 * o.width - x_obj, o.stiffness, hl.reach1, hl.k_h, p1);
    r.q2 = solve_finger(s.q2_set, c.servo_stiffness, 0.5 * o.width + x_obj, o.stiffness, hl.reach2, hl.k_h, p2);
    r.push1 = p1 > 0.0 ? hand_force(r.q1, hl.reach1, hl.k_h, p1) : 0.0;
    r.push2 = p2 > 0.0 ? hand_force(r.q2, hl.reach2, hl.k_h, p2) : 0.0;
    return r;
}

double spring_balance(const FingerSolve& f, const ObjectSpec& o, double x, double push_obj) {
    const double c1 = o.stiffness * std::max(0.0, -f.q1 - (x - 0.5 * o.width));
    const double c2 = o.stiffness * std::max(0.0, (x + 0.5 * o.width) - f.q2);
    return c1 - c2 + push_obj;
}

void substep(PlantState& s, const ObjectSpec& o, const DisturbanceSchedule& sched, const PlantConfig& c,
             const ControlCommand& cmd, double h) {
    const double t = s.t + h;
    s.wrist_angle = sched.wrist.angle_at(t);
    const double gn = s.g_dot_n(c.gravity);

    const double max_move = c.max_finger_speed * h;
    const double lag = c.servo_time_constant > 0.0 ? 1.0 - std::exp(-h / c.servo_time_constant) : 1.0;
    auto track = [&](double set, double target) {
        target = std::clamp(target, c.q_min, c.q_max);
        return set + std::clamp(lag * (target - set), -max_move, max_move);
    };
    s.q1_set = track(s.q1_set, cmd.q1_cmd);
    s.q2_set = track(s.q2_set, cmd.q2_cmd);

    double prof1 = 0.0, prof2 = 0.0, push_obj = 0.0;
    for (const Push& p : sched.pushes) {
        const double f = p.force_at(t);
        if (p.target == PushTarget::Finger1) prof1 += f;
        if (p.target == PushTarget::Finger2) prof2 += f;
        if (p.target == PushTarget::Object) push_obj += f;
    }
    auto engage = [&](double prof, bool& engaged, double& anchor, double q) {
        if (prof > 0.0 && !engaged) {
            engaged = true;
            anchor = q;
        } else if (prof <= 0.0) {
            engaged = false;
        }
    };
    engage(prof1, s.hand_engaged1, s.hand_anchor1, s.q1);
    engage(prof2, s.hand_engaged2, s.hand_anchor2, s.q2);
    const HandLoad hl{s.hand_anchor1 - sched.hand_reach, s.hand_anchor2 - sched.hand_reach, prof1, prof2,
                      sched.hand_stiffness};

    const double q1_old = s.q1, q2_old = s.q2, x_old = s.x_obj;

    if (o.mass > 0.0) {
        const FingerSolve f = solve_fingers(s, o, c, hl, s.x_obj);
        s.q1 = f.q1;
        s.q2 = f.q2;
        s.q1_dot = (s.q1 - q1_old) / h;
        s.q2_dot = (s.q2 - q2_old) / h;
        s.push1 = f.push1;
        s.push2 = f.push2;
        s.push_obj = push_obj;
        const ContactForces cf = contact_forces(s, o);
        s.true_f1 = cf.f1;
        s.true_f2 = cf.f2;

        const double force = cf.f1 - cf.f2 + o.mass * gn + push_obj - c.object_drag * s.v_obj;
        double v = s.v_obj;
        if (c.table_friction > 0.0) {
            const double fmax = c.table_friction * o.mass * c.gravity;
            if (v == 0.0) {
                if (std::abs(force) > fmax) v = h * (force - std::copysign(fmax, force)) / o.mass;
            } else {
                const double nv = v + h * (force - std::copysign(fmax, v)) / o.mass;
                v = (nv * v <= 0.0) ? 0.0 : nv;
            }
        } else {
            v += h * force / o.mass;
        }
        s.v_obj = v;
        s.x_obj += h * v;
        // Fingers are quasi-static: re-seat them on the moved object so the reported state is consistent.
        const FingerSolve g = solve_fingers(s, o, c, hl, s.x_obj);
        s.q1 = g.q1;
        s.q2 = g.q2;
        s.q1_dot = (s.q1 - q1_old) / h;
        s.q2_dot = (s.q2 - q2_old) / h;
        s.push1 = g.push1;
        s.push2 = g.push2;
        const ContactForces seated = contact_forces(s, o);
        s.true_f1 = seated.f1;
        s.true_f2 = seated.f2;
    } else {
        // Massless object: place it where the spring forces balance.
        auto residual = [&](double x) { return spring_balance(solve_fingers(s, o, c, hl, x), o, x, push_obj); };
        const double r0 = residual(s.x_obj);
        if (r0 != 0.0) {
            const double dir = r0 > 0.0 ? 1.0 : -1.0;
            double lo = s.x_obj, hi = s.x_obj, span = 1e-4;
            while (dir * residual(hi) > 0.0 && span < 1.0) {
                lo = hi;
                hi = s.x_obj + dir * span;
                span *= 2.0;
            }
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                (dir * residual(mid) > 0.0 ? lo : hi) = mid;
            }
            s.x_obj = hi;
        }
        const FingerSolve f = solve_fingers(s, o, c, hl, s.x_obj);
        s.q1 = f.q1;
        s.q2 = f.q2;
        s.q1_dot = (s.q1 - q1_old) / h;
        s.q2_dot = (s.q2 - q2_old) / h;
        s.push1 = f.push1;
        s.push2 = f.push2;
        s.push_obj = push_obj;
        s.v_obj = (s.x_obj - x_old) / h;
        PlantState spring_only = s;
        spring_only.q1_dot = spring_only.q2_dot = spring_only.v_obj = 0.0;
        const ContactForces cf = contact_forces(spring_only, o);
        s.true_f1 = cf.f1;
        s.true_f2 = cf.f2;
    }
    s.load1 = s.true_f1 - s.push1;
    s.load2 = s.true_f2 - s.push2;
    s.t = t;
}

}  // namespace

PlantState step(const PlantState& state, const ObjectSpec& object, const DisturbanceSchedule& schedule,
                const PlantConfig& config, const ControlCommand& cmd, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("plant step needs dt > 0");
    PlantState s = state;
    const double period = 1.0 / config.physics_rate;
    const int n = std::max(1, static_cast<int>(std::lround(dt / period))) * config.substeps;
    const double h = dt / n;
    for (int i = 0; i < n; ++i) substep(s, object, schedule, config, cmd, h);
    return s;
}

Plant::Plant(ObjectSpec object, DisturbanceSchedule schedule, PlantConfig config, double q1, double q2)
    : object_(std::move(object)), schedule_(std::move(schedule)), config_(config) {
    object_.validate();
    schedule_.validate();
    config_.validate();
    state_ = initial_state(object_, q1, q2);
}

void Plant::advance(const ControlCommand& cmd, double control_dt) {
    state_ = step(state_, object_, schedule_, config_, cmd, control_dt);
}

}  // namespace graspctl
