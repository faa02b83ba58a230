#include "g2kern/random.hpp"

#include <cmath>
#include <numbers>

namespace g2kern {

Complex Rng::disc(double rmax)
{
    const double r = rmax * std::sqrt(uniform());
    const double phi = 2.0 * std::numbers::pi * uniform();
    return std::polar(r, phi);
}

G2Point random_g2_point(Rng& rng, double rmax)
{
    const Complex a = rng.disc(rmax);
    const Complex b = rng.disc(rmax);
    return G2Point(a + b, a * b);
}

MoebiusMap random_moebius(Rng& rng, double alpha_max)
{
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    return MoebiusMap(std::polar(1.0, theta), DiscPoint(rng.disc(alpha_max)));
}

std::vector<std::pair<G2Point, G2Point>> random_pair_sample(Rng& rng, int n, double rmax)
{
    std::vector<std::pair<G2Point, G2Point>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.emplace_back(random_g2_point(rng, rmax), random_g2_point(rng, rmax));
    return out;
}

} // namespace g2kern
