#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "g2kern/geometry.hpp"

namespace g2kern {

struct EvalOptions {
    double series_threshold = 1e-2;  // raw/series switchover on |z1-z2||w1-w2|
    int series_terms = 200;
    int branch_path_steps = 32;
    double fd_step = 1e-4;  // step of the polarized curvature differences

    void validate() const;
};

class KernelSpec;

struct WeightedBergman {
    double lambda;
};
struct SymmetricC {
    double lambda;
};
struct DetCurvature {
    double lambda;
    double nu;
};
struct MatrixCurvature {
    double lambda;
};
struct Power {
    std::shared_ptr<const KernelSpec> base;
    double nu;
};
struct Product {
    std::vector<KernelSpec> factors;
};

// Closed description of one kernel family on G_2.
//
//   WeightedBergman(l)   B^(l), the weighted Bergman kernel
//   Power(base, nu)      base^nu, path-continued for non-integer nu
//   SymmetricC(l)        C^(l), the kernel of the symmetric-part module
//   DetCurvature(l, nu)  det[(B^(l))^(nu+2) BB^(l)], nu >= 0
//   MatrixCurvature(l)   (B^(l))^(l+2) BB^(l), a 2x2 matrix kernel
//   Product([...])       pointwise product of scalar specs
//
// where BB^(l) is the polarized curvature matrix of B^(l).
class KernelSpec {
public:
    using Family =
        std::variant<WeightedBergman, Power, SymmetricC, DetCurvature,
                     MatrixCurvature, Product>;

    explicit KernelSpec(Family family);

    static KernelSpec bergman(double lambda);
    static KernelSpec power(KernelSpec base, double nu);
    static KernelSpec symmetric_c(double lambda);
    static KernelSpec det_curvature(double lambda, double nu);
    static KernelSpec matrix_curvature(double lambda);
    static KernelSpec product(std::vector<KernelSpec> factors);

    // Compact string form: "bergman:l=2", "power:bergman:l=2,nu=1.5",
    // "symC:l=1", "detcurv:l=2,nu=1", "matcurv:l=2",
    // "product:[bergman:l=1;bergman:l=2]".
    static KernelSpec parse(const std::string& text);
    std::string str() const;

    bool matrix_valued() const;
    const Family& family() const { return family_; }

private:
    Family family_;
};

// Scalar kernel evaluation; Hermitian by construction:
// eval_kernel(spec, u, v) == conj(eval_kernel(spec, v, u)) exactly.
Complex eval_kernel(const KernelSpec& spec, const G2Point& u, const G2Point& v,
                    const EvalOptions& opts = {});

// 2x2 matrix kernels (MatrixCurvature).
Eigen::Matrix2cd eval_kernel_matrix(const KernelSpec& spec, const G2Point& u,
                                    const G2Point& v, const EvalOptions& opts = {});

Complex eval_bergman_raw(double lambda, const Disc2Point& z, const Disc2Point& w);
Complex eval_bergman_series(double lambda, const Disc2Point& z, const Disc2Point& w,
                            const EvalOptions& opts = {});
Complex eval_symmetric(double lambda, const G2Point& u, const G2Point& v);
Complex eval_power(const KernelSpec& base, double nu, const G2Point& u,
                   const G2Point& v, const EvalOptions& opts = {});

// Polarized curvature matrix ((d_i dbar_j log B^(lambda)))(u, v) by nested
// central differences with Richardson extrapolation.
Eigen::Matrix2cd bergman_curvature_polarized(double lambda, const G2Point& u,
                                             const G2Point& v,
                                             const EvalOptions& opts = {});

// H^(lambda) on the diagonal: quotient form away from the diagonal tube
// |z1 - z2| >= 1e-2, series form inside it.
double eval_H(double lambda, const Disc2Point& z, const EvalOptions& opts = {});

struct SeriesAuditRecord {
    double lambda = 0.0;
    int p = 0;
    double coefficient = 0.0;
    std::map<std::string, double> helper_values;
};

// Coefficient h_p of the H-series (the bracketed combinatorial sum), with
// the individual summands recorded.
SeriesAuditRecord h_coefficients(double lambda, int p);

// The proof quantities L, Ltilde, G1..G4 and b22 at (x, 0), used by the
// inequivalence limits x -> 1.
SeriesAuditRecord inequiv_proof_helpers(double lambda, double x);

double binomial(double lambda, int k);

} // namespace g2kern
