#include "graspctl/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graspctl {

Sensor::Sensor(SensorModel model) : model_(model), rng_(model.seed), gamma_assumed_(model.gamma) {
    if (!(model.gamma > 0.0)) throw std::invalid_argument("sensor gamma must be > 0");
    if (!(model.noise_sigma >= 0.0)) throw std::invalid_argument("sensor noise_sigma must be >= 0");
}

double Sensor::sample_raw(double true_force) {
    // Draw even when noiseless so the stream position does not depend on sigma.
    const double n = gauss_(rng_);
    return true_force / model_.gamma + model_.bias + model_.noise_sigma * n;
}

double Sensor::estimate_bias(int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("bias estimation needs at least one sample");
    // Deviations from the first sample; a constant signal comes back exactly.
    const double first = sample_raw(0.0);
    double dev = 0.0;
    for (int i = 1; i < n_samples; ++i) dev += sample_raw(0.0) - first;
    return first + dev / n_samples;
}

void Sensor::set_calibration(double gamma_assumed, double bias_estimate) {
    gamma_assumed_ = gamma_assumed;
    bias_estimate_ = bias_estimate;
}

SensorReading Sensor::read(double true_force, double timestamp) {
    const double raw = sample_raw(true_force);
    return {raw, calibrate(raw, gamma_assumed_, bias_estimate_), timestamp};
}

double calibrate(double raw, double gamma, double bias_estimate) { return gamma * (raw - bias_estimate); }

bool contact_detected(double f_calibrated, double f_theta) { return f_calibrated > f_theta; }

ContactDetector::ContactDetector(double f_theta, int debounce, double floor)
    : threshold_(std::max(f_theta, floor)), debounce_(debounce) {
    if (!(f_theta > 0.0)) throw std::invalid_argument("contact threshold must be > 0");
    if (debounce < 1) throw std::invalid_argument("debounce count must be >= 1");
}

bool ContactDetector::update(double f_calibrated) {
    count_ = contact_detected(f_calibrated, threshold_) ? count_ + 1 : 0;
    return latched();
}

}  // namespace graspctl
