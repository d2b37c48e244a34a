#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graspctl/sensor.hpp"

namespace graspctl {
namespace {

TEST(Sensor, UnloadedNoiselessReadsBias) {
    Sensor s({kGamma1, 0.35, 0.0, 1});
    EXPECT_EQ(s.sample_raw(0.0), 0.35);
}

TEST(Sensor, RawFromForce) {
    Sensor s({11.02, 0.5, 0.0, 1});
    EXPECT_NEAR(s.sample_raw(1.0), 1.0 / 11.02 + 0.5, 1e-15);
    EXPECT_NEAR(s.sample_raw(1.0), 0.590744, 1e-6);
}

TEST(Sensor, SeededStreamIsDeterministic) {
    Sensor a({kGamma1, 0.1, 0.01, 77}), b({kGamma1, 0.1, 0.01, 77}), c({kGamma1, 0.1, 0.01, 78});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double va = a.sample_raw(0.3);
        EXPECT_EQ(va, b.sample_raw(0.3));
        differs = differs || va != c.sample_raw(0.3);
    }
    EXPECT_TRUE(differs);
}

TEST(Sensor, RejectsInvalidModel) {
    EXPECT_THROW(Sensor({0.0, 0.0, 0.0, 1}), std::invalid_argument);
    EXPECT_THROW(Sensor({kGamma1, 0.0, -1.0, 1}), std::invalid_argument);
}

TEST(BiasEstimate, NoiselessIsExact) {
    Sensor s({kGamma1, -0.21, 0.0, 3});
    EXPECT_EQ(s.estimate_bias(), -0.21);
}

TEST(BiasEstimate, SingleSampleEqualsOneReading) {
    Sensor a({kGamma1, 0.2, 0.05, 9}), b({kGamma1, 0.2, 0.05, 9});
    EXPECT_EQ(a.estimate_bias(1), b.sample_raw(0.0));
}

TEST(BiasEstimate, RejectsEmptySample) {
    Sensor s({kGamma1, 0.2, 0.05, 9});
    EXPECT_THROW(s.estimate_bias(0), std::invalid_argument);
}

TEST(BiasEstimate, WithinFiveStandardErrors) {
    const double sigma = 0.004, bound = 5.0 * sigma / std::sqrt(1000.0);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Sensor s({kGamma1, 0.35, sigma, seed});
        EXPECT_LT(std::abs(s.estimate_bias(1000) - 0.35), bound) << "seed " << seed;
    }
}

TEST(BiasEstimate, StandardErrorShrinksWithRootN) {
    auto spread = [](int n) {
        std::vector<double> e;
        for (std::uint64_t seed = 0; seed < 400; ++seed) {
            Sensor s({kGamma1, 0.0, 0.01, seed});
            e.push_back(s.estimate_bias(n));
        }
        double m = 0.0, v = 0.0;
        for (double x : e) m += x;
        m /= static_cast<double>(e.size());
        for (double x : e) v += (x - m) * (x - m);
        return std::sqrt(v / static_cast<double>(e.size() - 1));
    };
    const double ratio = spread(100) / spread(1600);
    EXPECT_GT(ratio, 3.4);
    EXPECT_LT(ratio, 4.6);
}

TEST(Calibrate, Examples) {
    EXPECT_EQ(calibrate(0.35, kGamma1, 0.35), 0.0);
    EXPECT_NEAR(calibrate(0.6, 11.02, 0.5), 1.102, 1e-12);
}

TEST(Calibrate, NoiselessRoundTrip) {
    Sensor s({kGamma2, 0.35, 0.0, 5});
    s.set_calibration(kGamma2, s.estimate_bias());
    for (double f : {0.0, 0.2, 1.0, 2.5, 17.0}) EXPECT_NEAR(s.read(f, 0.0).calibrated, f, 1e-13 * (1.0 + f));
}

TEST(Calibrate, MiscalibratedGainScalesReading) {
    Sensor s({kGamma1 * 1.01, 0.0, 0.0, 5});
    s.set_calibration(kGamma1, 0.0);
    EXPECT_NEAR(s.read(2.0, 0.0).calibrated, 2.0 / 1.01, 1e-12);
}

TEST(ContactDetected, StrictThreshold) {
    EXPECT_TRUE(contact_detected(0.25, 0.2));
    EXPECT_FALSE(contact_detected(0.2, 0.2));
    EXPECT_FALSE(contact_detected(-0.1, 0.2));
}

TEST(ContactDetected, DefaultNoiseFalsePositiveRate) {
    Sensor s({kGamma1, 0.35, kDefaultNoiseSigma, 123});
    s.set_calibration(kGamma1, s.estimate_bias());
    int hits = 0;
    double peak = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double f = s.read(0.0, 0.0).calibrated;
        peak = std::max(peak, std::abs(f));
        hits += contact_detected(f, kContactThreshold);
    }
    EXPECT_LT(hits / 1e5, 1e-4);
    // Unloaded noise peaks near half the threshold.
    EXPECT_GT(peak, 0.05);
    EXPECT_LT(peak, 0.15);
}

TEST(ContactDetector, DefaultsMatchThresholdRule) {
    ContactDetector d(0.2);
    EXPECT_FALSE(d.update(0.2));
    EXPECT_TRUE(d.update(0.21));
    EXPECT_FALSE(d.update(0.1));
}

TEST(ContactDetector, DebounceNeedsConsecutiveTicks) {
    ContactDetector d(0.2, 3);
    EXPECT_FALSE(d.update(0.3));
    EXPECT_FALSE(d.update(0.3));
    EXPECT_FALSE(d.update(0.1));
    EXPECT_FALSE(d.update(0.3));
    EXPECT_FALSE(d.update(0.3));
    EXPECT_TRUE(d.update(0.3));
}

TEST(ContactDetector, FloorRaisesThreshold) {
    ContactDetector d(0.2, 1, 0.35);
    EXPECT_FALSE(d.update(0.3));
    EXPECT_TRUE(d.update(0.36));
    EXPECT_THROW(ContactDetector(0.0), std::invalid_argument);
    EXPECT_THROW(ContactDetector(0.2, 0), std::invalid_argument);
}

}  // namespace
}  // namespace graspctl
