#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "g2kern/kernels.hpp"
#include "g2kern/random.hpp"

namespace g2kern {

enum class SampleScheme { Grid, Random, File };

struct SampleSet {
    std::vector<G2Point> points;
    std::uint64_t seed = 0;
    SampleScheme scheme = SampleScheme::Random;

    // Polar grid in each disc coordinate, pushed through symmetrize and
    // deduplicated; at most n points.
    static SampleSet grid(int n, double rmax = 0.85);
    static SampleSet random(int n, std::uint64_t seed, double rmax = 0.85);
    // CSV rows "re(u1),im(u1),re(u2),im(u2)".
    static SampleSet from_csv(const std::string& path);
    void to_csv(const std::string& path) const;

    // Pairwise distinct (min distance > 1e-8), all in G_2, size <= 64.
    void validate() const;
};

struct PSDReport {
    int n = 0;
    double min_eig = 0.0;
    double max_eig = 0.0;
    bool psd = false;
    double tol = 1e-9;

    const char* verdict() const { return psd ? "psd" : "not_psd"; }
};

// Gram matrix G(i,j) = K(w_i, w_j); for matrix kernels the 2n x 2n block
// matrix.  Hermitian by construction.
Eigen::MatrixXcd gram(const KernelSpec& spec, const SampleSet& sample,
                      const EvalOptions& opts = {});

// Eigenvalue verdict: psd iff min_eig >= -tol * max(|max_eig|, 1e-30).
PSDReport psd_check(const Eigen::MatrixXcd& g, double tol = 1e-9);

// PSD scan of (B^(lambda))^nu over a grid of exponents.  A not_psd verdict
// certifies nu outside the Wallach set for this sample; a psd verdict is
// evidence only.
std::vector<std::pair<double, PSDReport>> wallach_probe(
    double lambda, const std::vector<double>& nu_grid, const SampleSet& sample,
    const EvalOptions& opts = {});

} // namespace g2kern
