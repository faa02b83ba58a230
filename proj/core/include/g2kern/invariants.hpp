#pragma once

#include <array>
#include <string>
#include <vector>

#include "g2kern/homogeneity.hpp"

namespace g2kern {

enum class ModuleFamily { WeightedPower, DetCurvature };

// (lambda, nu) of a weighted-power module (B^(lambda))^nu or of a
// det-curvature module det[(B^(lambda))^(nu+2) BB^(lambda)].
struct ModuleSpec {
    ModuleFamily family = ModuleFamily::WeightedPower;
    double lambda = 1.0;
    double nu = 1.0;

    void validate() const;
    static ModuleSpec parse(const std::string& text);  // "w:l=2,nu=1" / "d:l=1,nu=0"
    std::string str() const;
};

struct InvariantSignature {
    ModuleFamily family;
    // WeightedPower: (nu(lambda+1), nu lambda).
    // DetCurvature:  ((nu+2)(lambda+1), (2nu+4) lambda).
    std::array<double, 2> closed_pair;
    // Fitted slope of log K(s(z,z), s(z,z)) against -log(1-|z|^2), from the
    // oracle evaluation at |z|^2 in {0.5, 0.75}.
    double numeric_diagonal_exponent;
    // The exponent printed in the royal-diagonal display (kept side by side
    // with the numeric value; they disagree for the det family).
    double paper_diagonal_exponent;
};

InvariantSignature signature(const ModuleSpec& m, const EvalOptions& opts = {});

struct ClassifyVerdict {
    bool equivalent = false;
    std::string witness;
};

// Same family: equivalent iff the invariant pairs coincide (iff the
// parameters do).  Cross family: always inequivalent, witnessed by the
// obstruction quadratic having no positive root.
ClassifyVerdict classify(const ModuleSpec& a, const ModuleSpec& b);

struct QuadraticReport {
    std::array<double, 3> coefficients;  // (nu, 5 - 4 nu, 23 nu + 35)
    double discriminant;                 // -76 nu^2 - 180 nu + 25
    bool has_positive_root;
};

QuadraticReport cross_family_quadratic(double nu);

struct KEPointEstimate {
    G2Point point = G2Point::origin();
    Eigen::Matrix2cd ricci;
    Eigen::Matrix2cd metric;
    std::vector<Complex> ratios;  // Ric_ij / B_ij over the usable entries
};

struct KEReport {
    std::vector<KEPointEstimate> c_estimates;
    double max_ratio_spread = 0.0;
    bool einstein_consistent = false;

    const char* verdict() const
    {
        return einstein_consistent ? "einstein_consistent" : "not_einstein";
    }
};

// Ricci of the weighted Bergman metric, Ric = -dd^bar log det B^(lambda),
// differenced on the semi-analytic oracle determinant field and compared
// entrywise against the metric.  Points must be interior, off the royal
// variety, with margin for the differencing.
KEReport ke_test(double lambda, const std::vector<G2Point>& points,
                 const FDOptions& fd = {});

// Control run with the field replaced by (B^(lambda))^c: the ratios are
// entrywise constant and the spread collapses to differencing noise.
KEReport ke_test_power_control(double lambda, double c,
                               const std::vector<G2Point>& points,
                               const FDOptions& fd = {},
                               const EvalOptions& opts = {});

struct AuditRow {
    std::string formula;
    double r = 0.0;
    double paper = 0.0;
    double oracle = 0.0;
    double rel_gap = 0.0;
};

// Cross-validation table: closed curvature entries against the
// differentiation oracle, the printed determinant formulas against the
// closed-entry determinant, and the royal-diagonal determinant display
// against the transported oracle.
std::vector<AuditRow> audit(double lambda, const std::vector<double>& r_grid,
                            double nu = 0.0, const FDOptions& fd = {},
                            const EvalOptions& opts = {});

} // namespace g2kern
