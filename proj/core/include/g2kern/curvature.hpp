#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

#include "g2kern/automorphisms.hpp"
#include "g2kern/kernels.hpp"

namespace g2kern {

enum class Chart { G2, Bidisc };

// 2x2 matrix of mixed second log-derivatives at a base point.  In the G2
// chart the base is a point of the symmetrized bidisc; in the Bidisc chart
// it is the bidisc preimage.
struct CurvatureMatrix {
    Eigen::Matrix2cd entries;
    Complex base1, base2;
    Chart chart = Chart::G2;
    double error_estimate = 0.0;  // h vs h/2 stencil discrepancy, relative

    bool hermitian(double tol = 1e-10) const;
    double min_eigenvalue() const;  // of the Hermitian part
    bool positive_semidefinite(double tol = 1e-8) const;  // min >= -tol*trace

    G2Point base_g2() const;  // throws unless chart == G2
};

struct FDOptions {
    double step = 1e-4;
    bool richardson = true;

    void validate() const;
};

using KernelFn = std::function<Complex(const G2Point&, const G2Point&)>;

// Curvature by nested two-sided differences of the polarized log kernel
// (holomorphic slot and antiholomorphic slot separately), Richardson
// extrapolated, Hermitian part returned.  Throws NumericError when the
// h vs h/2 discrepancy exceeds 1e-4 relative.
CurvatureMatrix curvature_numeric(const KernelSpec& spec, const G2Point& u,
                                  const FDOptions& fd = {},
                                  const EvalOptions& opts = {});

// Same differencing driven by an arbitrary sesquiholomorphic kernel callback
// (double precision; used for synthetic controls and cross-checks).
CurvatureMatrix curvature_numeric_fn(const KernelFn& kernel, const G2Point& u,
                                     const FDOptions& fd = {});

// Closed forms of the curvature of B^(lambda) on the fundamental set:
// the bidisc-chart matrix at (r, 0) in D^2 and the G2-chart matrix at
// (r, 0) in G_2.  r = 0 returns the limiting values.
std::pair<CurvatureMatrix, CurvatureMatrix>
curvature_fundamental_closed(double lambda, double r);

// K(g(z)) = (Dg(z)^tr)^{-1} K(z) conj(Dg(z))^{-1} at base point g(z).
CurvatureMatrix curvature_transport(const CurvatureMatrix& at_z,
                                    const AutomorphismMap& g);

// Chart conversion through the symmetrization map: b = Ds^tr K conj(Ds).
CurvatureMatrix curvature_to_bidisc(const CurvatureMatrix& k_g2, const Disc2Point& z);
// Inverse conversion; throws SingularJacobianError on the royal variety.
CurvatureMatrix curvature_to_g2(const CurvatureMatrix& b, const Disc2Point& z);

enum class DetMethod { Oracle, Paper };

// det of the curvature of B^(lambda) at u.  Oracle: determinant of the
// closed fundamental-set entries transported along the group orbit.
// Paper: the printed ratio formula on the fundamental set, transported the
// same way (kept separate so the audit can difference the two).
double det_curvature(double lambda, const G2Point& u,
                     DetMethod method = DetMethod::Oracle);

// Fundamental-set determinant formulas, as functions of r in [0, 1).
double det_curvature_fundamental_closed(double lambda, double r);  // the oracle
double det_curvature_ratio_form(double lambda, double r);  // printed ratio form
// Variants weighted by the diagonal Bergman value of weight lambda + shift
// (shift = 1 reproduces the oracle; shift = 2 is the other printed display).
double det_curvature_weight_variant(double lambda, double r, int weight_shift);

} // namespace g2kern
