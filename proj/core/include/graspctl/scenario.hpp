#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "graspctl/controller.hpp"
#include "graspctl/plant.hpp"
#include "graspctl/sensor.hpp"

namespace graspctl {

enum class ControllerKind { Force, Trajectory };
enum class Ablation { None, NoCompliance, NoDeadband, NoGravityComp };

const char* controller_name(ControllerKind k);
const char* ablation_name(Ablation a);

struct SensorConfig {
    std::array<double, 2> gamma{kGamma1, kGamma2};  // nominal N per raw unit
    std::array<double, 2> bias{0.35, -0.21};        // raw units
    double noise_sigma = kDefaultNoiseSigma;        // raw units
    // Relative error of the true gain against the nominal one, per finger.
    std::array<double, 2> miscalibration{0.0, 0.0};
    int bias_samples = kBiasSamples;
};

struct ClosureConfig {
    double mu = 0.5;
    double mu_tau = 0.005;  // m
    int sides = 8;
};

struct ScenarioSpec {
    std::string name = "trial";
    ObjectSpec object = tape_roll();
    double offset = 0.0;  // m, toward finger 2
    ControllerKind controller = ControllerKind::Force;
    Ablation ablation = Ablation::None;
    DisturbanceSchedule disturbances;
    ControllerConfig control;
    bool mass_from_object = true;  // controller uses the true object mass for gravity compensation
    PlantConfig plant;
    SensorConfig sensor;
    ClosureConfig closure;
    std::uint64_t seed = 1;
    double duration = 12.0;        // s
    double start_aperture = 0.09;  // m
    // The trajectory baseline closes to width - jtc_penetration at the force controller's closing speed.
    double jtc_penetration = 0.004;  // m
    double jtc_dwell = 0.5;          // s held at the end pose

    // Throws ConfigError.
    void validate() const;
    // Controller configuration after the ablation switch and mass policy are applied.
    ControllerConfig effective_control() const;
};

// Base for experiment A: object resting on a table, horizontal gripper, stop at goal.
ScenarioSpec experiment_a_scenario(const ObjectSpec& object, double offset, ControllerKind controller);
// Experiment B: object centered in the air.
ScenarioSpec push_scenario(Ablation ablation);
ScenarioSpec rotation_scenario(Ablation ablation);

std::string to_json_text(const ScenarioSpec& spec);
// Strict: every key must be known. Missing keys keep the values from `base`.
ScenarioSpec scenario_from_json_text(const std::string& text, const ScenarioSpec& base = {});
ScenarioSpec load_scenario_file(const std::string& path, const std::vector<std::string>& overrides = {});
// Each override is "dotted.path=value"; value is JSON when it parses, else a bare string.
ScenarioSpec apply_overrides(const ScenarioSpec& spec, const std::vector<std::string>& overrides);

}  // namespace graspctl
