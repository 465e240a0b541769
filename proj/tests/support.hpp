#pragma once

// Seeded generators shared by the property tests.

#include <cmath>
#include <random>

#include "lindbloch/state_space.hpp"

namespace testgen {

inline constexpr std::uint64_t kSeed = 0x5eed1234abcdULL;

class Gen {
public:
    explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    /// Uniform point of the closed unit ball.
    lindbloch::BlochVector ball_point() {
        for (;;) {
            const lindbloch::Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
            if (v.norm() <= 1.0) return lindbloch::BlochVector(v);
        }
    }

    lindbloch::BlochVector sphere_point() {
        lindbloch::Vec3 v;
        do {
            v = lindbloch::Vec3(normal(), normal(), normal());
        } while (v.norm() < 1e-3);
        return lindbloch::BlochVector(v / v.norm());
    }

    lindbloch::QubitHamiltonian hamiltonian(double scale = 10.0) {
        return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
    }

    lindbloch::DecayRates rates(double scale = 5.0) {
        return {uniform(0, scale), uniform(0, scale), uniform(0, scale)};
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double max_abs_diff(const lindbloch::Vec3& a, const lindbloch::Vec3& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testgen
