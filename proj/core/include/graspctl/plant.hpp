#pragma once

#include <string>
#include <vector>

#include "graspctl/controller.hpp"

namespace graspctl {

inline constexpr double kGravity = 9.81;

struct ObjectSpec {
    std::string name = "object";
    double mass = 0.049;        // kg
    double width = 0.045;       // m
    double stiffness = 2000.0;  // N/m, true contact stiffness
    double damping = 1.0;       // N*s/m, contact damping on approach
    double initial_offset = 0.0;  // m, toward finger 2

    void validate() const;
};

ObjectSpec styrofoam_cylinder();
ObjectSpec tape_roll();
ObjectSpec wooden_cuboid();

enum class PushTarget { Finger1, Finger2, Object };

const char* push_target_name(PushTarget t);

// Trapezoidal force profile over [t_start, t_end] with linear ramps of length `ramp`.
struct Push {
    PushTarget target = PushTarget::Finger1;
    double t_start = 0.0;
    double t_end = 0.0;
    double force = 0.0;  // N, plateau
    double ramp = 0.2;   // s

    double force_at(double t) const;
};

// Constant-rate wrist rotation; angle held at the ends.
struct WristProfile {
    double t_start = 0.0;
    double t_end = 0.0;
    double angle_start = 0.0;  // rad
    double angle_end = 0.0;

    double angle_at(double t) const;
};

struct DisturbanceSchedule {
    std::vector<Push> pushes;
    WristProfile wrist;
    // A finger push is a hand pressing up to hand_reach past where it first touched the finger:
    // force min(profile, k_h * (q - (anchor - reach))). A finger that yields further loses it.
    double hand_stiffness = 2000.0;  // N/m
    double hand_reach = 0.003;       // m

    void validate() const;
};

struct PlantConfig {
    double physics_rate = 1000.0;  // Hz
    int substeps = 4;
    double servo_stiffness = 1000.0;  // N/m, finger position servo; inf = rigid
    double servo_time_constant = 0.02;  // s, first-order set-point lag; 0 = none
    double max_finger_speed = 0.05;  // m/s
    double q_min = 0.0;
    double q_max = 0.045;
    double table_friction = 0.0;  // Coulomb coefficient against a support; 0 when held in air
    double object_drag = 0.0;     // N*s/m
    double gravity = kGravity;

    void validate() const;
};

struct PlantState {
    double t = 0.0;
    double x_obj = 0.0;  // m, + toward finger 2
    double v_obj = 0.0;
    double q1 = 0.0;  // fingertip distance from gripper center; x_L = -q1, x_R = q2
    double q2 = 0.0;
    double q1_dot = 0.0;
    double q2_dot = 0.0;
    double q1_set = 0.0;  // servo set-points after the speed limit
    double q2_set = 0.0;
    double true_f1 = 0.0;  // N, normal contact forces
    double true_f2 = 0.0;
    double load1 = 0.0;  // N, what each fingertip load cell carries
    double load2 = 0.0;
    double push1 = 0.0;
    double push2 = 0.0;
    double push_obj = 0.0;
    double wrist_angle = 0.0;  // rad
    // Finger position when the hand first touched it during the current push.
    double hand_anchor1 = 0.0;
    double hand_anchor2 = 0.0;
    bool hand_engaged1 = false;
    bool hand_engaged2 = false;

    double g_dot_n(double g = kGravity) const;
};

struct ContactForces {
    double f1 = 0.0;
    double f2 = 0.0;
};

ContactForces contact_forces(const PlantState& state, const ObjectSpec& object);

PlantState initial_state(const ObjectSpec& object, double q1, double q2);

// Advances by dt (split into config.substeps pieces per physics period). Throws
// std::invalid_argument for dt <= 0.
PlantState step(const PlantState& state, const ObjectSpec& object, const DisturbanceSchedule& schedule,
                const PlantConfig& config, const ControlCommand& cmd, double dt);

class Plant {
public:
    Plant(ObjectSpec object, DisturbanceSchedule schedule, PlantConfig config, double q1, double q2);

    const PlantState& state() const { return state_; }
    const ObjectSpec& object() const { return object_; }
    const PlantConfig& config() const { return config_; }

    // Runs physics for one control period (zero-order hold of cmd).
    void advance(const ControlCommand& cmd, double control_dt);

private:
    ObjectSpec object_;
    DisturbanceSchedule schedule_;
    PlantConfig config_;
    PlantState state_;
};

double hand_force(double q, double q_reach, double k_h, double p_max);

// Returns the q satisfying k_srv (q - q_set) + hand_force(q, ...) = k_o max(0, q_surf - q).
// p_max <= 0 means no hand. A non-finite k_srv pins q to q_set.
double solve_finger(double q_set, double k_srv, double q_surf, double k_o, double q_reach, double k_h, double p_max);

}  // namespace graspctl
