#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "g2kern/automorphisms.hpp"

namespace g2kern {

// Seeded generator with platform-independent uniforms (std distributions are
// implementation-defined; the raw engine output is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform over the disc of radius rmax.
    Complex disc(double rmax);

private:
    std::mt19937_64 eng_;
};

G2Point random_g2_point(Rng& rng, double rmax = 0.9);
MoebiusMap random_moebius(Rng& rng, double alpha_max = 0.8);
std::vector<std::pair<G2Point, G2Point>> random_pair_sample(Rng& rng, int n,
                                                            double rmax = 0.9);

} // namespace g2kern
