#include "graspctl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graspctl/errors.hpp"

namespace graspctl {

using nlohmann::json;

const char* controller_name(ControllerKind k) { return k == ControllerKind::Force ? "force" : "trajectory"; }

const char* ablation_name(Ablation a) {
    switch (a) {
        case Ablation::None: return "baseline";
        case Ablation::NoCompliance: return "no_compliance";
        case Ablation::NoDeadband: return "no_deadband";
        case Ablation::NoGravityComp: return "no_gravity_comp";
    }
    return "?";
}

void ScenarioSpec::validate() const {
    object.validate();
    disturbances.validate();
    plant.validate();
    effective_control().validate();
    if (!std::isfinite(offset)) throw ConfigError("offset must be finite");
    if (!(std::isfinite(duration) && duration > 0.0)) throw ConfigError("duration must be finite and > 0");
    if (!(std::isfinite(start_aperture) && start_aperture > 0.0)) throw ConfigError("start_aperture must be finite and > 0");
    if (0.5 * start_aperture > plant.q_max + 1e-12) throw ConfigError("start_aperture exceeds the finger travel");
    if (object.width + 2.0 * std::abs(offset) > start_aperture)
        throw ConfigError("object " + object.name + " (width " + std::to_string(object.width) + " m, offset " +
                          std::to_string(offset) + " m) does not fit the start aperture");
    if (!(std::isfinite(jtc_penetration) && jtc_penetration >= 0.0 && jtc_penetration < object.width))
        throw ConfigError("jtc.penetration must be in [0, object.width)");
    if (!(std::isfinite(jtc_dwell) && jtc_dwell >= 0.0)) throw ConfigError("jtc.dwell must be >= 0");
    for (int i = 0; i < 2; ++i) {
        const std::string k = std::to_string(i);
        if (!(std::isfinite(sensor.gamma[i]) && sensor.gamma[i] > 0.0)) throw ConfigError("sensor.gamma." + k + " must be > 0");
        if (!std::isfinite(sensor.bias[i])) throw ConfigError("sensor.bias." + k + " must be finite");
        if (!(std::isfinite(sensor.miscalibration[i]) && std::abs(sensor.miscalibration[i]) < 0.5))
            throw ConfigError("sensor.miscalibration." + k + " must be in (-0.5, 0.5)");
    }
    if (!(std::isfinite(sensor.noise_sigma) && sensor.noise_sigma >= 0.0)) throw ConfigError("sensor.noise_sigma must be >= 0");
    if (sensor.bias_samples < 1) throw ConfigError("sensor.bias_samples must be >= 1");
    if (!(std::isfinite(closure.mu) && closure.mu >= 0.0)) throw ConfigError("closure.mu must be >= 0");
    if (!(std::isfinite(closure.mu_tau) && closure.mu_tau >= 0.0)) throw ConfigError("closure.mu_tau must be >= 0");
    if (closure.sides < 3) throw ConfigError("closure.sides must be >= 3");
}

ControllerConfig ScenarioSpec::effective_control() const {
    ControllerConfig c = control;
    if (mass_from_object) c.mass = object.mass;
    switch (ablation) {
        case Ablation::None: break;
        case Ablation::NoCompliance: c.compliance_enabled = false; break;
        case Ablation::NoDeadband: c.deadband_enabled = false; break;
        case Ablation::NoGravityComp: c.gravity_comp_enabled = false; break;
    }
    return c;
}

ScenarioSpec experiment_a_scenario(const ObjectSpec& object, double offset, ControllerKind controller) {
    ScenarioSpec s;
    s.name = "exp_a";
    s.object = object;
    s.offset = offset;
    s.controller = controller;
    s.plant.table_friction = 0.5;
    s.control.phase3_mode = Phase3Mode::StopAtGoal;
    s.duration = 20.0;
    return s;
}

namespace {

ScenarioSpec experiment_b_base(Ablation ablation) {
    ScenarioSpec s;
    s.object = tape_roll();
    s.offset = 0.0;
    s.ablation = ablation;
    s.start_aperture = s.object.width + 0.01;
    return s;
}

}  // namespace

ScenarioSpec push_scenario(Ablation ablation) {
    ScenarioSpec s = experiment_b_base(ablation);
    s.name = std::string("push_") + ablation_name(ablation);
    s.sensor.miscalibration = {0.01, -0.01};
    s.disturbances.pushes = {{PushTarget::Finger1, 3.0, 5.4, 1.0, 0.2}, {PushTarget::Finger2, 10.5, 12.9, 1.0, 0.2}};
    s.duration = 18.0;
    return s;
}

ScenarioSpec rotation_scenario(Ablation ablation) {
    ScenarioSpec s = experiment_b_base(ablation);
    s.name = std::string("rotation_") + ablation_name(ablation);
    s.disturbances.wrist = {3.0, 13.0, 0.0, std::numbers::pi};
    s.duration = 15.0;
    return s;
}

namespace {

template <class E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<ControllerKind> kControllerNames[] = {{ControllerKind::Force, "force"},
                                                         {ControllerKind::Trajectory, "trajectory"}};
constexpr EnumName<Ablation> kAblationNames[] = {{Ablation::None, "none"},
                                                 {Ablation::NoCompliance, "no_compliance"},
                                                 {Ablation::NoDeadband, "no_deadband"},
                                                 {Ablation::NoGravityComp, "no_gravity_comp"}};
constexpr EnumName<Phase3Mode> kModeNames[] = {{Phase3Mode::HoldForever, "hold_forever"},
                                               {Phase3Mode::StopAtGoal, "stop_at_goal"}};
constexpr EnumName<PushTarget> kTargetNames[] = {
    {PushTarget::Finger1, "finger1"}, {PushTarget::Finger2, "finger2"}, {PushTarget::Object, "object"}};

template <class E, std::size_t N>
const char* enum_to(const EnumName<E> (&names)[N], E v) {
    for (const auto& n : names)
        if (n.value == v) return n.name;
    return "?";
}

template <class E, std::size_t N>
E enum_from(const EnumName<E> (&names)[N], const json& j, const std::string& key) {
    const std::string s = j.get<std::string>();
    for (const auto& n : names)
        if (s == n.name) return n.value;
    std::string allowed;
    for (const auto& n : names) allowed += std::string(allowed.empty() ? "" : ", ") + n.name;
    throw ConfigError(key + ": unknown value '" + s + "' (expected one of " + allowed + ")");
}

json servo_to_json(double k) { return std::isfinite(k) ? json(k) : json("rigid"); }

double servo_from_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "rigid") return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

json push_to_json(const Push& p) {
    return {{"target", enum_to(kTargetNames, p.target)},
            {"t_start", p.t_start},
            {"t_end", p.t_end},
            {"force", p.force},
            {"ramp", p.ramp}};
}

json to_tree(const ScenarioSpec& s) {
    const ControllerConfig& c = s.control;
    json pushes = json::array();
    for (const Push& p : s.disturbances.pushes) pushes.push_back(push_to_json(p));
    return {
        {"name", s.name},
        {"seed", s.seed},
        {"duration", s.duration},
        {"offset", s.offset},
        {"start_aperture", s.start_aperture},
        {"object",
         {{"name", s.object.name},
          {"mass", s.object.mass},
          {"width", s.object.width},
          {"stiffness", s.object.stiffness},
          {"damping", s.object.damping}}},
        {"controller",
         {{"type", enum_to(kControllerNames, s.controller)},
          {"ablation", enum_to(kAblationNames, s.ablation)},
          {"f_goal", c.f_goal},
          {"f_theta", c.f_theta},
          {"f_phi", c.f_phi},
          {"kp_int", c.kp_int},
          {"ki_int", c.ki_int},
          {"ks_int", c.ks_int},
          {"kp_ext", c.kp_ext},
          {"k_ext", c.k_ext},
          {"mass", c.mass},
          {"mass_from_object", s.mass_from_object},
          {"control_rate", c.control_rate},
          {"phase3_mode", enum_to(kModeNames, c.phase3_mode)},
          {"gravity_comp_enabled", c.gravity_comp_enabled},
          {"compliance_enabled", c.compliance_enabled},
          {"deadband_enabled", c.deadband_enabled},
          {"closing_speed", c.closing_speed},
          {"q_min", c.q_min},
          {"q_max", c.q_max},
          {"goal_tolerance", c.goal_tolerance},
          {"goal_dwell", c.goal_dwell},
          {"contact_debounce", c.contact_debounce},
          {"detection_floor", c.detection_floor}}},
        {"jtc", {{"penetration", s.jtc_penetration}, {"dwell", s.jtc_dwell}}},
        {"plant",
         {{"physics_rate", s.plant.physics_rate},
          {"substeps", s.plant.substeps},
          {"servo_stiffness", servo_to_json(s.plant.servo_stiffness)},
          {"servo_time_constant", s.plant.servo_time_constant},
          {"max_finger_speed", s.plant.max_finger_speed},
          {"q_min", s.plant.q_min},
          {"q_max", s.plant.q_max},
          {"table_friction", s.plant.table_friction},
          {"object_drag", s.plant.object_drag},
          {"gravity", s.plant.gravity}}},
        {"sensor",
         {{"gamma", s.sensor.gamma},
          {"bias", s.sensor.bias},
          {"noise_sigma", s.sensor.noise_sigma},
          {"miscalibration", s.sensor.miscalibration},
          {"bias_samples", s.sensor.bias_samples}}},
        {"closure", {{"mu", s.closure.mu}, {"mu_tau", s.closure.mu_tau}, {"sides", s.closure.sides}}},
        {"disturbances",
         {{"hand_stiffness", s.disturbances.hand_stiffness},
          {"hand_reach", s.disturbances.hand_reach},
          {"pushes", pushes},
          {"wrist",
           {{"t_start", s.disturbances.wrist.t_start},
            {"t_end", s.disturbances.wrist.t_end},
            {"angle_start", s.disturbances.wrist.angle_start},
            {"angle_end", s.disturbances.wrist.angle_end}}}}},
    };
}

const json push_template = push_to_json(Push{});

// Overlays `patch` onto `tree`, rejecting keys that `tree` does not have. Arrays are replaced.
void merge_strict(json& tree, const json& patch, const std::string& path) {
    if (!patch.is_object()) throw ConfigError((path.empty() ? std::string("scenario") : path) + " must be an object");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!tree.contains(it.key())) throw ConfigError("unknown key: " + key);
        json& slot = tree[it.key()];
        if (slot.is_object()) {
            merge_strict(slot, it.value(), key);
        } else if (it.key() == "pushes") {
            if (!it.value().is_array()) throw ConfigError(key + " must be an array");
            json out = json::array();
            for (std::size_t i = 0; i < it.value().size(); ++i) {
                json p = push_template;
                merge_strict(p, it.value()[i], key + "." + std::to_string(i));
                out.push_back(p);
            }
            slot = out;
        } else {
            slot = it.value();
        }
    }
}

ScenarioSpec from_tree(const json& t) {
    ScenarioSpec s;
    try {
        s.name = t.at("name").get<std::string>();
        s.seed = t.at("seed").get<std::uint64_t>();
        s.duration = t.at("duration").get<double>();
        s.offset = t.at("offset").get<double>();
        s.start_aperture = t.at("start_aperture").get<double>();

        const json& o = t.at("object");
        s.object.name = o.at("name").get<std::string>();
        s.object.mass = o.at("mass").get<double>();
        s.object.width = o.at("width").get<double>();
        s.object.stiffness = o.at("stiffness").get<double>();
        s.object.damping = o.at("damping").get<double>();

        const json& c = t.at("controller");
        ControllerConfig& cc = s.control;
        s.controller = enum_from(kControllerNames, c.at("type"), "controller.type");
        s.ablation = enum_from(kAblationNames, c.at("ablation"), "controller.ablation");
        cc.f_goal = c.at("f_goal").get<double>();
        cc.f_theta = c.at("f_theta").get<double>();
        cc.f_phi = c.at("f_phi").get<double>();
        cc.kp_int = c.at("kp_int").get<double>();
        cc.ki_int = c.at("ki_int").get<double>();
        cc.ks_int = c.at("ks_int").get<double>();
        cc.kp_ext = c.at("kp_ext").get<double>();
        cc.k_ext = c.at("k_ext").get<double>();
        cc.mass = c.at("mass").get<double>();
        s.mass_from_object = c.at("mass_from_object").get<bool>();
        cc.control_rate = c.at("control_rate").get<double>();
        cc.phase3_mode = enum_from(kModeNames, c.at("phase3_mode"), "controller.phase3_mode");
        cc.gravity_comp_enabled = c.at("gravity_comp_enabled").get<bool>();
        cc.compliance_enabled = c.at("compliance_enabled").get<bool>();
        cc.deadband_enabled = c.at("deadband_enabled").get<bool>();
        cc.closing_speed = c.at("closing_speed").get<double>();
        cc.q_min = c.at("q_min").get<double>();
        cc.q_max = c.at("q_max").get<double>();
        cc.goal_tolerance = c.at("goal_tolerance").get<double>();
        cc.goal_dwell = c.at("goal_dwell").get<double>();
        cc.contact_debounce = c.at("contact_debounce").get<int>();
        cc.detection_floor = c.at("detection_floor").get<double>();

        s.jtc_penetration = t.at("jtc").at("penetration").get<double>();
        s.jtc_dwell = t.at("jtc").at("dwell").get<double>();

        const json& p = t.at("plant");
        s.plant.physics_rate = p.at("physics_rate").get<double>();
        s.plant.substeps = p.at("substeps").get<int>();
        s.plant.servo_stiffness = servo_from_json(p.at("servo_stiffness"));
        s.plant.servo_time_constant = p.at("servo_time_constant").get<double>();
        s.plant.max_finger_speed = p.at("max_finger_speed").get<double>();
        s.plant.q_min = p.at("q_min").get<double>();
        s.plant.q_max = p.at("q_max").get<double>();
        s.plant.table_friction = p.at("table_friction").get<double>();
        s.plant.object_drag = p.at("object_drag").get<double>();
        s.plant.gravity = p.at("gravity").get<double>();

        const json& se = t.at("sensor");
        s.sensor.gamma = se.at("gamma").get<std::array<double, 2>>();
        s.sensor.bias = se.at("bias").get<std::array<double, 2>>();
        s.sensor.noise_sigma = se.at("noise_sigma").get<double>();
        s.sensor.miscalibration = se.at("miscalibration").get<std::array<double, 2>>();
        s.sensor.bias_samples = se.at("bias_samples").get<int>();

        const json& cl = t.at("closure");
        s.closure.mu = cl.at("mu").get<double>();
        s.closure.mu_tau = cl.at("mu_tau").get<double>();
        s.closure.sides = cl.at("sides").get<int>();

        const json& d = t.at("disturbances");
        s.disturbances.hand_stiffness = d.at("hand_stiffness").get<double>();
        s.disturbances.hand_reach = d.at("hand_reach").get<double>();
        for (std::size_t i = 0; i < d.at("pushes").size(); ++i) {
            const json& pj = d.at("pushes")[i];
            Push push;
            push.target = enum_from(kTargetNames, pj.at("target"), "disturbances.pushes." + std::to_string(i) + ".target");
            push.t_start = pj.at("t_start").get<double>();
            push.t_end = pj.at("t_end").get<double>();
            push.force = pj.at("force").get<double>();
            push.ramp = pj.at("ramp").get<double>();
            s.disturbances.pushes.push_back(push);
        }
        const json& w = d.at("wrist");
        s.disturbances.wrist = {w.at("t_start").get<double>(), w.at("t_end").get<double>(), w.at("angle_start").get<double>(),
                                w.at("angle_end").get<double>()};
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
    s.object.initial_offset = s.offset;
    return s;
}

}  // namespace

std::string to_json_text(const ScenarioSpec& spec) { return to_tree(spec).dump(2) + "\n"; }

ScenarioSpec scenario_from_json_text(const std::string& text, const ScenarioSpec& base) {
    json patch;
    try {
        patch = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    json tree = to_tree(base);
    merge_strict(tree, patch, "");
    return from_tree(tree);
}

ScenarioSpec load_scenario_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ScenarioSpec s;
    try {
        s = scenario_from_json_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return apply_overrides(s, overrides);
}

ScenarioSpec apply_overrides(const ScenarioSpec& spec, const std::vector<std::string>& overrides) {
    if (overrides.empty()) return spec;
    json tree = to_tree(spec);
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + ov);
        const std::string key = ov.substr(0, eq);
        const std::string text = ov.substr(eq + 1);
        json* node = &tree;
        std::stringstream parts(key);
        std::string part;
        while (std::getline(parts, part, '.')) {
            if (node->is_object() && node->contains(part)) {
                node = &(*node)[part];
            } else if (node->is_array() && !part.empty() && part.find_first_not_of("0123456789") == std::string::npos &&
                       std::stoul(part) < node->size()) {
                node = &(*node)[std::stoul(part)];
            } else {
                throw ConfigError("unknown override key: " + key);
            }
        }
        if (node->is_object() || node->is_array()) throw ConfigError("override key does not name a value: " + key);
        json value;
        try {
            value = json::parse(text);
        } catch (const json::parse_error&) {
            value = text;
        }
        const bool rigid = value.is_string() && value.get<std::string>() == "rigid";
        if (node->is_number() && !value.is_number() && !rigid) throw ConfigError("override " + key + " expects a number, got: " + text);
        if (node->is_boolean() && !value.is_boolean()) throw ConfigError("override " + key + " expects true/false, got: " + text);
        *node = value;
    }
    return from_tree(tree);
}

}  // namespace graspctl
