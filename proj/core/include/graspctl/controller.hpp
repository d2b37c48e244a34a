#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>

#include "graspctl/sensor.hpp"

namespace graspctl {

enum class Phase { Closing, EstablishContact, Holding };
enum class Phase3Mode { HoldForever, StopAtGoal };

const char* phase_name(Phase p);  // closing | contact | holding

struct ControllerConfig {
    double f_goal = 2.0;  // N
    double f_theta = kContactThreshold;
    double f_phi = kContactThreshold;
    double kp_int = 1.9;
    double ki_int = 9.0;
    double ks_int = 1000.0;  // N/m
    double kp_ext = 1.9;
    double k_ext = 1000.0;  // N/m
    double mass = 0.0;      // kg
    double control_rate = 100.0;  // Hz
    Phase3Mode phase3_mode = Phase3Mode::HoldForever;
    bool gravity_comp_enabled = true;
    bool compliance_enabled = true;
    bool deadband_enabled = true;

    double closing_speed = 0.01;  // aperture reduction, m/s
    double q_min = 0.0;           // joint limits, m
    double q_max = 0.045;
    double goal_tolerance = 0.05;  // N
    double goal_dwell = 0.25;      // s
    int contact_debounce = 1;
    double detection_floor = 0.0;  // N

    double dt() const { return 1.0 / control_rate; }
    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct ControllerState {
    Phase phase = Phase::Closing;
    std::array<bool, 2> frozen{false, false};
    double integral_int = 0.0;   // N*s
    double ref_object_pos = 0.0;  // m
    double q1_cmd = 0.0;
    double q2_cmd = 0.0;
    bool finished = false;
    bool fault = false;
    std::string fault_message;
    double goal_timer = 0.0;
    // Last computed signals, for logging.
    double f_int = 0.0;
    double f_ext = 0.0;
    double u_int = 0.0;
    double u_ext = 0.0;
};

struct ControlCommand {
    double q1_cmd = 0.0;
    double q2_cmd = 0.0;
};

// Positive f_ext pushes the object toward finger 2 (+x).
double compute_external_force(double f1, double f2, double mass, double g_dot_n, bool gravity_comp_enabled = true);

double compute_internal_control(double f1, double f2, double f_goal, ControllerState& state, const ControllerConfig& config,
                                double dt);

double compute_external_control(double f_ext, double object_pos, ControllerState& state, const ControllerConfig& config);

std::pair<double, double> distribute(double u_int, double u_ext);

// Gripper center between the fingertips: (x_R + x_L) / 2 with x_L = -q1, x_R = q2.
inline double object_position(double q1, double q2) { return 0.5 * (q2 - q1); }

// Returns whether the current contact set is force-closure.
using ClosureProbe = std::function<bool()>;

struct ControllerInput {
    double f1 = 0.0;  // calibrated, N
    double f2 = 0.0;
    double q1 = 0.0;  // measured, m
    double q2 = 0.0;
    double g_dot_n = 0.0;  // m/s^2
};

class GraspController {
public:
    GraspController(ControllerConfig config, double q1_start, double q2_start);

    const ControllerConfig& config() const { return config_; }
    const ControllerState& state() const { return state_; }
    ControllerState& mutable_state() { return state_; }

    // Runtime goal adaptation; takes effect on the next tick.
    void set_goal_force(double f_goal);

    // Never throws; non-finite input holds the previous command and sets state().fault.
    ControlCommand tick(const ControllerInput& in, const ClosureProbe& closure_probe);

private:
    ControlCommand tick_holding(const ControllerInput& in);

    ControllerConfig config_;
    ControllerState state_;
    std::array<ContactDetector, 2> detectors_;
};

// Open-loop baseline: linear interpolation of the aperture regardless of forces.
class TrajectoryController {
public:
    TrajectoryController(double start_aperture, double end_aperture, double duration);

    double duration() const { return duration_; }
    ControlCommand tick(double q1, double q2, double t) const;

private:
    double start_;
    double end_;
    double duration_;
};

}  // namespace graspctl
