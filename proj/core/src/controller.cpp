#include "graspctl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graspctl/errors.hpp"

namespace graspctl {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Closing: return "closing";
        case Phase::EstablishContact: return "contact";
        case Phase::Holding: return "holding";
    }
    return "?";
}

void ControllerConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(std::string("controller.") + field + " " + what);
    };
    auto positive = [&](double v, const char* f) { require(std::isfinite(v) && v > 0.0, f, "must be finite and > 0"); };
    positive(f_goal, "f_goal");
    positive(f_theta, "f_theta");
    require(f_phi >= 0.0 && !std::isnan(f_phi), "f_phi", "must be >= 0");
    positive(kp_int, "kp_int");
    positive(ki_int, "ki_int");
    positive(ks_int, "ks_int");
    positive(kp_ext, "kp_ext");
    positive(k_ext, "k_ext");
    require(std::isfinite(mass) && mass >= 0.0, "mass", "must be finite and >= 0");
    positive(control_rate, "control_rate");
    positive(closing_speed, "closing_speed");
    require(std::isfinite(q_min) && std::isfinite(q_max) && q_min < q_max, "q_min", "must be below q_max");
    positive(goal_tolerance, "goal_tolerance");
    require(std::isfinite(goal_dwell) && goal_dwell >= 0.0, "goal_dwell", "must be >= 0");
    require(contact_debounce >= 1, "contact_debounce", "must be >= 1");
    require(std::isfinite(detection_floor) && detection_floor >= 0.0, "detection_floor", "must be >= 0");
}

double compute_external_force(double f1, double f2, double mass, double g_dot_n, bool gravity_comp_enabled) {
    const double gravity = gravity_comp_enabled ? mass * g_dot_n : 0.0;
    return -(f1 - f2 + gravity);
}

double compute_internal_control(double f1, double f2, double f_goal, ControllerState& state, const ControllerConfig& config,
                                double dt) {
    const double df = f1 + f2 - f_goal;
    state.integral_int += df * dt;
    // Keep the integral contribution within one joint travel.
    const double limit = (config.q_max - config.q_min) * config.ks_int / config.ki_int;
    state.integral_int = std::clamp(state.integral_int, -limit, limit);
    return (config.kp_int * df + config.ki_int * state.integral_int) / config.ks_int;
}

double compute_external_control(double f_ext, double object_pos, ControllerState& state, const ControllerConfig& config) {
    const double comply = config.kp_ext * f_ext / config.k_ext;
    if (!config.compliance_enabled) return state.ref_object_pos - object_pos;
    if (!config.deadband_enabled) {
        state.ref_object_pos = object_pos;
        return comply;
    }
    if (std::abs(f_ext) > config.f_phi) {
        state.ref_object_pos = object_pos;
        return comply;
    }
    return state.ref_object_pos - object_pos;
}

std::pair<double, double> distribute(double u_int, double u_ext) {
    return {0.5 * (-u_ext + u_int), 0.5 * (u_ext + u_int)};
}

GraspController::GraspController(ControllerConfig config, double q1_start, double q2_start)
    : config_(std::move(config)),
      detectors_{ContactDetector(config_.f_theta, config_.contact_debounce, config_.detection_floor),
                 ContactDetector(config_.f_theta, config_.contact_debounce, config_.detection_floor)} {
    config_.validate();
    state_.q1_cmd = q1_start;
    state_.q2_cmd = q2_start;
}

void GraspController::set_goal_force(double f_goal) {
    if (!(std::isfinite(f_goal) && f_goal > 0.0)) throw ConfigError("controller.f_goal must be finite and > 0");
    config_.f_goal = f_goal;
}

ControlCommand GraspController::tick(const ControllerInput& in, const ClosureProbe& closure_probe) {
    const ControlCommand hold{state_.q1_cmd, state_.q2_cmd};
    if (state_.fault) return hold;
    const double vals[] = {in.f1, in.f2, in.q1, in.q2, in.g_dot_n};
    const char* names[] = {"f1", "f2", "q1", "q2", "g_dot_n"};
    for (int i = 0; i < 5; ++i) {
        if (!std::isfinite(vals[i])) {
            std::ostringstream os;
            os << "non-finite measurement " << names[i] << " = " << vals[i] << " in phase " << phase_name(state_.phase);
            state_.fault = true;
            state_.fault_message = os.str();
            return hold;
        }
    }

    state_.f_int = in.f1 + in.f2;
    state_.f_ext = compute_external_force(in.f1, in.f2, config_.mass, in.g_dot_n, config_.gravity_comp_enabled);

    if (state_.phase == Phase::Holding) return tick_holding(in);

    const double f[] = {in.f1, in.f2};
    bool new_contact = false;
    for (std::size_t i = 0; i < 2; ++i) {
        if (state_.frozen[i]) continue;
        if (detectors_[i].update(f[i])) {
            state_.frozen[i] = true;
            new_contact = true;
        }
    }
    if (new_contact) {
        state_.phase = Phase::EstablishContact;
        if (closure_probe && closure_probe()) {
            state_.phase = Phase::Holding;
            state_.integral_int = 0.0;
            state_.ref_object_pos = object_position(in.q1, in.q2);
            return hold;
        }
    }

    const double step = 0.5 * config_.closing_speed * config_.dt();
    if (!state_.frozen[0]) state_.q1_cmd = std::max(config_.q_min, state_.q1_cmd - step);
    if (!state_.frozen[1]) state_.q2_cmd = std::max(config_.q_min, state_.q2_cmd - step);
    return {state_.q1_cmd, state_.q2_cmd};
}

ControlCommand GraspController::tick_holding(const ControllerInput& in) {
    const double dt = config_.dt();
    if (state_.finished) return {state_.q1_cmd, state_.q2_cmd};

    state_.u_int = compute_internal_control(in.f1, in.f2, config_.f_goal, state_, config_, dt);
    state_.u_ext = compute_external_control(state_.f_ext, object_position(in.q1, in.q2), state_, config_);
    const auto [dq1, dq2] = distribute(state_.u_int, state_.u_ext);
    state_.q1_cmd = std::clamp(in.q1 + dq1, config_.q_min, config_.q_max);
    state_.q2_cmd = std::clamp(in.q2 + dq2, config_.q_min, config_.q_max);

    if (config_.phase3_mode == Phase3Mode::StopAtGoal) {
        state_.goal_timer = std::abs(state_.f_int - config_.f_goal) < config_.goal_tolerance ? state_.goal_timer + dt : 0.0;
        if (state_.goal_timer >= config_.goal_dwell - 1e-12) state_.finished = true;
    }
    return {state_.q1_cmd, state_.q2_cmd};
}

TrajectoryController::TrajectoryController(double start_aperture, double end_aperture, double duration)
    : start_(start_aperture), end_(end_aperture), duration_(duration) {
    if (!(duration > 0.0)) throw ConfigError("trajectory duration must be > 0");
}

ControlCommand TrajectoryController::tick(double, double, double t) const {
    const double s = std::clamp(t / duration_, 0.0, 1.0);
    const double q = 0.5 * (start_ + s * (end_ - start_));
    return {q, q};
}

}  // namespace graspctl
