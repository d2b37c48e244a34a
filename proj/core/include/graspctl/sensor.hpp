#pragma once

#include <cstdint>
#include <random>

namespace graspctl {

inline constexpr double kGamma1 = 11.02;  // N per raw unit
inline constexpr double kGamma2 = 11.03;
inline constexpr double kContactThreshold = 0.2;  // N
inline constexpr int kBiasSamples = 1000;
// 5 sigma of calibrated noise lands at half the contact threshold.
inline constexpr double kDefaultNoiseSigma = 0.1 / (5.0 * kGamma1);

struct SensorModel {
    double gamma = kGamma1;  // true N per raw unit
    double bias = 0.0;       // raw units
    double noise_sigma = 0.0;  // raw units
    std::uint64_t seed = 0;
};

struct SensorReading {
    double raw = 0.0;
    double calibrated = 0.0;  // N
    double timestamp = 0.0;   // s
};

// One load-cell channel: owns the seeded noise stream.
class Sensor {
public:
    explicit Sensor(SensorModel model);

    const SensorModel& model() const { return model_; }

    double sample_raw(double true_force);

    // Mean of `n_samples` unloaded readings. Throws std::invalid_argument when n_samples < 1.
    double estimate_bias(int n_samples = kBiasSamples);

    // gamma_assumed is what the controller believes; it differs from model().gamma when miscalibrated.
    void set_calibration(double gamma_assumed, double bias_estimate);
    double gamma_assumed() const { return gamma_assumed_; }
    double bias_estimate() const { return bias_estimate_; }

    SensorReading read(double true_force, double timestamp);

private:
    SensorModel model_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
    double gamma_assumed_;
    double bias_estimate_ = 0.0;
};

double calibrate(double raw, double gamma, double bias_estimate);

bool contact_detected(double f_calibrated, double f_theta);

// Debounced detector with an optional minimum-detectable-force floor. Defaults reduce to
// contact_detected().
class ContactDetector {
public:
    ContactDetector(double f_theta, int debounce = 1, double floor = 0.0);
    bool update(double f_calibrated);
    bool latched() const { return count_ >= debounce_; }
    void reset() { count_ = 0; }

private:
    double threshold_;
    int debounce_;
    int count_ = 0;
};

}  // namespace graspctl
