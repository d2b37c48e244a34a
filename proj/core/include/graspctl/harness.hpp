#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graspctl/scenario.hpp"

namespace graspctl {

struct TimeSeriesRow {
    double t = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double f1 = 0.0;  // measured, N
    double f2 = 0.0;
    double f_int = 0.0;
    double f_ext = 0.0;
    double x_obj = 0.0;  // ground truth
    Phase phase = Phase::Closing;
    double u_int = 0.0;
    double u_ext = 0.0;
    // Ground truth that is not part of the CSV layout.
    double true_f1 = 0.0;
    double true_f2 = 0.0;
    double push1 = 0.0;
    double push2 = 0.0;
    double wrist_angle = 0.0;
};

struct TrialResult {
    std::string name;
    double displacement_truth = 0.0;  // m, |x_obj(end) - x_obj(start)|
    double displacement_proxy = 0.0;  // m, from joint states only
    double max_total_force = 0.0;     // N, true f1 + f2 once holding
    double settle_time = -1.0;        // s after holding starts until f_int is within 5 % of f_goal; -1 if never
    double overshoot = 0.0;           // N, max(f_int) - f_goal while holding
    double final_drift_rate = 0.0;    // m/s over the last second
    double holding_time = -1.0;       // s, when holding began; -1 if never
    bool finished = false;            // stop-at-goal completion
    bool fault = false;
    std::string fault_message;
    std::vector<TimeSeriesRow> series;
};

// Throws ConfigError for invalid specs, before simulating.
TrialResult run_trial(const ScenarioSpec& spec);

// Joint-state estimate of displacement: grasp center at the end against the known offset.
double displacement_proxy(double q1_end, double q2_end, double offset);

// --- metrics over a recorded series ---

// Largest |x(t) - x(t0)| for t in [t0, t1].
double max_object_excursion(const std::vector<TimeSeriesRow>& s, double t0, double t1);
// Largest true f1 + f2 for t in [t0, t1].
double max_true_total_force(const std::vector<TimeSeriesRow>& s, double t0, double t1);
// Longest stretch inside [t0, t1] during which the object speed, averaged over `window`, exceeds `rate`.
double sustained_drift_duration(const std::vector<TimeSeriesRow>& s, double t0, double t1, double rate, double window = 0.5);
// Control ticks after t0 until the measured grasp center (q2 - q1) / 2, averaged over the following
// `window`, moves no faster than `rate`. Counts up to the last tick whose window fits in [t0, t1].
int ticks_until_still(const std::vector<TimeSeriesRow>& s, double t0, double t1, double rate, double window = 0.5);

// --- CSV ---

inline constexpr const char* kCsvHeader = "t,q1,q2,f1,f2,f_int,f_ext,x_obj,phase,u_int,u_ext";

// Throws std::runtime_error naming the path on I/O failure, std::invalid_argument on empty input.
void write_csv(const std::string& path, const std::vector<TimeSeriesRow>& rows);
std::string format_csv(const std::vector<TimeSeriesRow>& rows);
std::vector<TimeSeriesRow> read_csv(const std::string& path);
Phase parse_phase(const std::string& name);

// --- experiment A ---

struct ExperimentAConfig {
    std::vector<ObjectSpec> objects{styrofoam_cylinder(), tape_roll(), wooden_cuboid()};
    std::vector<double> offsets{0.002, 0.005, 0.008, 0.011, 0.014};
    int repetitions = 3;
    std::uint64_t seed = 1;
    std::vector<std::string> overrides;  // applied to every trial scenario
    int threads = 0;                     // 0: hardware concurrency
};

struct ExperimentATrial {
    std::string object;
    ControllerKind controller = ControllerKind::Force;
    double offset = 0.0;
    int repetition = 0;
    std::uint64_t seed = 0;
    TrialResult result;  // series dropped
};

struct SummaryRow {
    std::string object;
    ControllerKind controller = ControllerKind::Force;
    int n = 0;
    double mean_truth = 0.0;  // m
    double std_truth = 0.0;
    double mean_proxy = 0.0;
    double std_proxy = 0.0;
};

struct OffsetRow {
    std::string object;
    ControllerKind controller = ControllerKind::Force;
    double offset = 0.0;
    double mean_truth = 0.0;
    double mean_proxy = 0.0;
};

struct ExperimentAResult {
    std::vector<ExperimentATrial> trials;  // sorted by object, controller, offset, repetition
    std::vector<SummaryRow> summary;       // objects x controllers
    std::vector<OffsetRow> per_offset;
    double wall_seconds = 0.0;

    const SummaryRow& row(const std::string& object, ControllerKind c) const;
};

ExperimentAResult run_experiment_a(const ExperimentAConfig& config);
std::string format_table(const ExperimentAResult& r);
// Writes trials.csv, summary.csv, per_offset.csv and summary.txt.
void write_experiment_a(const ExperimentAResult& r, const std::string& dir);

// --- experiment B ---

struct ExperimentBConfig {
    std::uint64_t seed = 1;
    std::vector<std::string> overrides;
    int threads = 0;
};

struct ExperimentBRun {
    std::string scenario;  // push | rotation
    Ablation ablation = Ablation::None;
    ScenarioSpec spec;
    TrialResult result;
    // push metrics (per push, in schedule order)
    std::vector<double> push_max_total_force;   // true f1+f2 on the plateau, once the yield has settled
    std::vector<double> push_peak_total_force;  // true f1+f2 over the whole push, onset transient included
    std::vector<double> post_push_drift;      // m, over 5 s after each push
    std::vector<double> post_push_sustained;  // s with drift rate > 0.1 mm/s
    std::vector<int> stop_ticks;  // control ticks after release until the fingers stop
    // rotation metric
    double rotation_drift = 0.0;  // m
};

struct ExperimentBResult {
    std::vector<ExperimentBRun> runs;  // push then rotation, each baseline, no_compliance, no_deadband, no_gravity_comp

    const ExperimentBRun& run(const std::string& scenario, Ablation a) const;
};

inline constexpr double kPostPushWindow = 5.0;     // s
inline constexpr double kPushSettle = 0.5;         // s after the ramp-up ends
inline constexpr double kDriftRateThreshold = 1e-4;  // m/s

ExperimentBResult run_experiment_b(const ExperimentBConfig& config);
std::string format_experiment_b(const ExperimentBResult& r);
// Writes one CSV per run plus metrics.csv.
void write_experiment_b(const ExperimentBResult& r, const std::string& dir);

}  // namespace graspctl
