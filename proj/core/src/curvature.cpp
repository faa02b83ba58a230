#include "g2kern/curvature.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "g2kern/detail/kernel_eval.hpp"
#include "g2kern/detail/polarized_fd.hpp"

namespace g2kern {

namespace {

using CLD = std::complex<long double>;

Complex to_cd(CLD v)
{
    return Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

Eigen::Matrix2cd hermitian_part(const Eigen::Matrix2cd& m)
{
    return 0.5 * (m + m.adjoint().eval());
}

// Long-double relative-log evaluator for a scalar spec, with the Bergman
// raw/series path frozen from the stencil center.
struct LogEvalLD {
    std::function<CLD(CLD, CLD, CLD, CLD)> fn;
};

LogEvalLD make_relative_log(const KernelSpec& spec, const G2Point& cu,
                            const G2Point& cv, const EvalOptions& opts);

LogEvalLD relative_log_bergman(double lambda, const G2Point& cu, const G2Point& cv,
                               const EvalOptions& opts)
{
    const long double lam = lambda;
    const long double thr = opts.series_threshold;
    const int terms = opts.series_terms;
    const auto path = detail::stencil_path<long double>(
        CLD(cu.u1()), CLD(cu.u2()), CLD(cv.u1()), CLD(cv.u2()));
    const CLD kc = detail::bergman_g2<long double>(lam, CLD(cu.u1()), CLD(cu.u2()),
                                                   CLD(cv.u1()), CLD(cv.u2()), thr,
                                                   terms, path);
    return {[=](CLD a1, CLD a2, CLD b1, CLD b2) {
        const CLD k = detail::bergman_g2<long double>(lam, a1, a2, b1, b2, thr,
                                                      terms, path);
        const CLD ratio = k / kc;
        if (std::abs(ratio - CLD(1)) > 0.9L)
            throw NumericError("curvature_numeric: log branch jump in stencil");
        return std::log(ratio);
    }};
}

LogEvalLD relative_log_symmetric(double lambda, const G2Point& cu, const G2Point& cv)
{
    const long double lam = lambda;
    const CLD kc = detail::symmetric_c_g2<long double>(
        lam, CLD(cu.u1()), CLD(cu.u2()), CLD(cv.u1()), CLD(cv.u2()));
    return {[=](CLD a1, CLD a2, CLD b1, CLD b2) {
        const CLD k = detail::symmetric_c_g2<long double>(lam, a1, a2, b1, b2);
        const CLD ratio = k / kc;
        if (std::abs(ratio - CLD(1)) > 0.9L)
            throw NumericError("curvature_numeric: log branch jump in stencil");
        return std::log(ratio);
    }};
}

LogEvalLD make_relative_log(const KernelSpec& spec, const G2Point& cu,
                            const G2Point& cv, const EvalOptions& opts)
{
    return std::visit(
        [&](const auto& fam) -> LogEvalLD {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, WeightedBergman>) {
                return relative_log_bergman(fam.lambda, cu, cv, opts);
            } else if constexpr (std::is_same_v<T, SymmetricC>) {
                return relative_log_symmetric(fam.lambda, cu, cv);
            } else if constexpr (std::is_same_v<T, Power>) {
                const long double nu = fam.nu;
                auto base = make_relative_log(*fam.base, cu, cv, opts);
                return {[=](CLD a1, CLD a2, CLD b1, CLD b2) {
                    return nu * base.fn(a1, a2, b1, b2);
                }};
            } else if constexpr (std::is_same_v<T, Product>) {
                std::vector<LogEvalLD> parts;
                for (const auto& f : fam.factors)
                    parts.push_back(make_relative_log(f, cu, cv, opts));
                return {[parts](CLD a1, CLD a2, CLD b1, CLD b2) {
                    CLD sum(0);
                    for (const auto& p : parts) sum += p.fn(a1, a2, b1, b2);
                    return sum;
                }};
            } else if constexpr (std::is_same_v<T, DetCurvature>) {
                const long double expo = 2.0L * fam.nu + 4.0L;
                auto base = relative_log_bergman(fam.lambda, cu, cv, opts);
                const long double lam = fam.lambda;
                const long double h = opts.fd_step;
                const long double thr = opts.series_threshold;
                const int terms = opts.series_terms;
                const auto detpol = [=](CLD a1, CLD a2, CLD b1, CLD b2) {
                    const auto bb = detail::bergman_polarized_raw<long double>(
                        lam, a1, a2, b1, b2, h, thr, terms);
                    return bb[0] * bb[3] - bb[1] * bb[2];
                };
                const CLD dc = detpol(CLD(cu.u1()), CLD(cu.u2()), CLD(cv.u1()),
                                      CLD(cv.u2()));
                return {[=](CLD a1, CLD a2, CLD b1, CLD b2) {
                    return expo * base.fn(a1, a2, b1, b2) +
                           std::log(detpol(a1, a2, b1, b2) / dc);
                }};
            } else {
                throw DomainError("curvature_numeric: matrix-valued spec");
            }
        },
        spec.family());
}

double interior_margin_scale(const G2Point& u, double step)
{
    const auto z = detail::quadratic_roots<double>(u.u1(), u.u2());
    const double zmax = std::max(std::abs(z[0]), std::abs(z[1]));
    if (zmax >= 1.0 - 4.0 * step)
        throw DomainError("curvature_numeric: base point too close to the boundary "
                          "for the requested step");
    return std::min(1.0, 5.0 * (1.0 - zmax * zmax));
}

CurvatureMatrix pack_numeric(const std::array<CLD, 4>& d, long double err,
                             const G2Point& u, bool richardson)
{
    Eigen::Matrix2cd m;
    m << to_cd(d[0]), to_cd(d[1]), to_cd(d[2]), to_cd(d[3]);
    CurvatureMatrix out;
    out.entries = hermitian_part(m);
    out.base1 = u.u1();
    out.base2 = u.u2();
    out.chart = Chart::G2;
    out.error_estimate = static_cast<double>(err);
    if (richardson && out.error_estimate > 1e-4)
        throw NumericError("curvature_numeric: stencil discrepancy above 1e-4");
    return out;
}

} // namespace

bool CurvatureMatrix::hermitian(double tol) const
{
    const double scale = entries.cwiseAbs().maxCoeff();
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <=
           tol * std::max(scale, 1e-30);
}

double CurvatureMatrix::min_eigenvalue() const
{
    const Eigen::Matrix2cd h = hermitian_part(entries);
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double off = std::abs(h(0, 1));
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
    return mid - rad;
}

bool CurvatureMatrix::positive_semidefinite(double tol) const
{
    const double tr = hermitian_part(entries).trace().real();
    return min_eigenvalue() >= -tol * std::max(std::abs(tr), 1e-30);
}

G2Point CurvatureMatrix::base_g2() const
{
    if (chart != Chart::G2)
        throw DomainError("CurvatureMatrix: base point is in the bidisc chart");
    return G2Point(base1, base2);
}

void FDOptions::validate() const
{
    if (!(step >= 1e-7 && step <= 1e-2))
        throw DomainError("FDOptions: step must lie in [1e-7, 1e-2]");
}

CurvatureMatrix curvature_numeric(const KernelSpec& spec, const G2Point& u,
                                  const FDOptions& fd, const EvalOptions& opts)
{
    fd.validate();
    opts.validate();
    const double h = fd.step * interior_margin_scale(u, fd.step);
    const auto logk = make_relative_log(spec, u, u, opts);
    long double err = 0;
    const auto d = detail::mixed_fd<long double>(
        logk.fn, CLD(u.u1()), CLD(u.u2()), CLD(u.u1()), CLD(u.u2()),
        static_cast<long double>(h), fd.richardson, &err);
    return pack_numeric(d, err, u, fd.richardson);
}

CurvatureMatrix curvature_numeric_fn(const KernelFn& kernel, const G2Point& u,
                                     const FDOptions& fd)
{
    fd.validate();
    const double h = fd.step * interior_margin_scale(u, fd.step);
    const Complex kc = kernel(u, u);
    const auto logk = [&](CLD a1, CLD a2, CLD b1, CLD b2) {
        const Complex k = kernel(G2Point(to_cd(a1), to_cd(a2)),
                                 G2Point(to_cd(b1), to_cd(b2)));
        const Complex ratio = k / kc;
        if (std::abs(ratio - Complex(1)) > 0.9)
            throw NumericError("curvature_numeric_fn: log branch jump in stencil");
        return CLD(std::log(ratio));
    };
    long double err = 0;
    const auto d = detail::mixed_fd<long double>(
        logk, CLD(u.u1()), CLD(u.u2()), CLD(u.u1()), CLD(u.u2()),
        static_cast<long double>(h), fd.richardson, &err);
    return pack_numeric(d, err, u, fd.richardson);
}

std::pair<CurvatureMatrix, CurvatureMatrix>
curvature_fundamental_closed(double lambda, double r)
{
    if (!(lambda > 0.0))
        throw DomainError("curvature_fundamental_closed: lambda must be positive");
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError("curvature_fundamental_closed: r must lie in [0, 1)");
    const auto f = detail::fundamental_curvature_closed<long double>(
        lambda, static_cast<long double>(r) * static_cast<long double>(r));

    CurvatureMatrix b;
    b.entries << static_cast<double>(f.b11), static_cast<double>(f.b12),
        static_cast<double>(f.b12), static_cast<double>(f.b22);
    b.base1 = r;
    b.base2 = 0.0;
    b.chart = Chart::Bidisc;

    CurvatureMatrix big;
    big.entries << static_cast<double>(f.B11), static_cast<double>(f.B12),
        static_cast<double>(f.B12), static_cast<double>(f.B22);
    big.base1 = r;
    big.base2 = 0.0;
    big.chart = Chart::G2;
    return {b, big};
}

CurvatureMatrix curvature_transport(const CurvatureMatrix& at_z,
                                    const AutomorphismMap& g)
{
    const G2Point z = at_z.base_g2();
    const auto jac = aut_jacobian(g, z);
    const Eigen::Matrix2cd a = jac.matrix.transpose().inverse();
    const Eigen::Matrix2cd b = jac.matrix.conjugate().inverse();
    const G2Point w = aut_apply(g, z);

    CurvatureMatrix out;
    out.entries = a * at_z.entries * b;
    out.base1 = w.u1();
    out.base2 = w.u2();
    out.chart = Chart::G2;
    out.error_estimate = at_z.error_estimate;
    return out;
}

CurvatureMatrix curvature_to_bidisc(const CurvatureMatrix& k_g2, const Disc2Point& z)
{
    if (k_g2.chart != Chart::G2)
        throw DomainError("curvature_to_bidisc: input is already in the bidisc chart");
    Eigen::Matrix2cd ds;
    ds << 1.0, 1.0, z.z2().value(), z.z1().value();
    CurvatureMatrix out;
    out.entries = ds.transpose() * k_g2.entries * ds.conjugate();
    out.base1 = z.z1().value();
    out.base2 = z.z2().value();
    out.chart = Chart::Bidisc;
    out.error_estimate = k_g2.error_estimate;
    return out;
}

CurvatureMatrix curvature_to_g2(const CurvatureMatrix& b, const Disc2Point& z)
{
    if (b.chart != Chart::Bidisc)
        throw DomainError("curvature_to_g2: input is already in the G2 chart");
    const Complex z1 = z.z1().value(), z2 = z.z2().value();
    if (std::abs(z1 - z2) < 1e-9)
        throw SingularJacobianError(
            "curvature_to_g2: symmetrization Jacobian is singular on the royal "
            "variety");
    Eigen::Matrix2cd ds;
    ds << 1.0, 1.0, z2, z1;
    const Eigen::Matrix2cd dst_inv = ds.transpose().inverse().eval();
    const Eigen::Matrix2cd dsc_inv = ds.conjugate().inverse().eval();
    const G2Point u = symmetrize(z);
    CurvatureMatrix out;
    out.entries = dst_inv * b.entries * dsc_inv;
    out.base1 = u.u1();
    out.base2 = u.u2();
    out.chart = Chart::G2;
    out.error_estimate = b.error_estimate;
    return out;
}

double det_curvature(double lambda, const G2Point& u, DetMethod method)
{
    const auto fd = to_fundamental(u);
    const double on_lambda = (method == DetMethod::Oracle)
                                 ? det_curvature_fundamental_closed(lambda, fd.r)
                                 : det_curvature_ratio_form(lambda, fd.r);
    if (fd.g.is_identity()) return on_lambda;
    const auto jac = aut_jacobian(fd.g, G2Point(fd.r, 0.0));
    return on_lambda / std::norm(jac.det);
}

double det_curvature_fundamental_closed(double lambda, double r)
{
    return static_cast<double>(
        detail::fundamental_curvature_closed<long double>(
            lambda, static_cast<long double>(r) * static_cast<long double>(r))
            .detB);
}

double det_curvature_ratio_form(double lambda, double r)
{
    const long double lam = lambda;
    const long double u = static_cast<long double>(r) * static_cast<long double>(r);
    if (u <= 0.0L)
        return static_cast<double>(lam * (lam + 1) * (2 * lam + 1) / 6.0L);
    const long double q = std::exp(lam * std::log1p(-u));
    const long double q1 = q * (1 - u);
    const long double b0 = detail::bergman_fundamental_diag<long double>(lam, u);
    const long double bracket =
        detail::ltilde_stable<long double>(lam, u) / (2 * u * q);
    return static_cast<double>(lam * lam * bracket /
                               (2 * u * u * b0 * b0 * q1));
}

double det_curvature_weight_variant(double lambda, double r, int weight_shift)
{
    if (weight_shift != 1 && weight_shift != 2)
        throw DomainError("det_curvature_weight_variant: shift must be 1 or 2");
    const long double lam = lambda;
    const long double sh = weight_shift;
    const long double u = static_cast<long double>(r) * static_cast<long double>(r);
    if (u <= 0.0L)
        return static_cast<double>((lam + sh) * (lam + 1) * (2 * lam + 1) / 6.0L);
    const long double q = std::exp(lam * std::log1p(-u));
    const long double q1 = q * (1 - u);
    const long double b0 = detail::bergman_fundamental_diag<long double>(lam, u);
    const long double b0s = detail::bergman_fundamental_diag<long double>(lam + sh, u);
    const long double bracket =
        detail::ltilde_stable<long double>(lam, u) / (2 * u * q);
    return static_cast<double>(lam * lam * b0s * bracket /
                               (2 * b0 * b0 * b0 * q1 * u * u));
}

} // namespace g2kern
