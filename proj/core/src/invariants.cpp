#include "g2kern/invariants.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "g2kern/detail/kernel_eval.hpp"

namespace g2kern {

namespace {

using CLD = std::complex<long double>;
using RealField = std::function<long double(CLD, CLD)>;

double fit_exponent(const std::function<double(double)>& k_of_x)
{
    // Two-point slope of log K against -log(1-x); exact for pure powers.
    const double x1 = 0.5, x2 = 0.75;
    return (std::log(k_of_x(x2)) - std::log(k_of_x(x1))) /
           (-std::log1p(-x2) + std::log1p(-x1));
}

// Mixed complex Hessian M_ij = d_i dbar_j f of a real scalar field on G_2 by
// central differences in the four real coordinates.
Eigen::Matrix2cd complex_hessian_once(const RealField& f, CLD u1, CLD u2,
                                      long double h)
{
    const CLD i1(0, 1);
    // Directions: 0 -> x1, 1 -> y1, 2 -> x2, 3 -> y2.
    const auto shift = [&](int dir, long double s) {
        CLD a = u1, b = u2;
        switch (dir) {
            case 0: a += s; break;
            case 1: a += i1 * s; break;
            case 2: b += s; break;
            default: b += i1 * s; break;
        }
        return std::pair<CLD, CLD>(a, b);
    };
    const auto second_same = [&](int dir) {
        const auto [ap, bp] = shift(dir, h);
        const auto [am, bm] = shift(dir, -h);
        return (f(ap, bp) - 2 * f(u1, u2) + f(am, bm)) / (h * h);
    };
    const auto second_cross = [&](int d1, int d2) {
        const auto at = [&](long double s1, long double s2) {
            auto [a, b] = shift(d1, s1);
            switch (d2) {
                case 0: a += s2; break;
                case 1: a += i1 * s2; break;
                case 2: b += s2; break;
                default: b += i1 * s2; break;
            }
            return f(a, b);
        };
        return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
    };

    const long double dx1x1 = second_same(0), dy1y1 = second_same(1);
    const long double dx2x2 = second_same(2), dy2y2 = second_same(3);
    const long double dx1x2 = second_cross(0, 2), dy1y2 = second_cross(1, 3);
    const long double dx1y2 = second_cross(0, 3), dy1x2 = second_cross(1, 2);

    Eigen::Matrix2cd m;
    m(0, 0) = Complex(static_cast<double>((dx1x1 + dy1y1) / 4), 0.0);
    m(1, 1) = Complex(static_cast<double>((dx2x2 + dy2y2) / 4), 0.0);
    m(0, 1) = Complex(static_cast<double>((dx1x2 + dy1y2) / 4),
                      static_cast<double>((dx1y2 - dy1x2) / 4));
    m(1, 0) = std::conj(m(0, 1));
    return m;
}

Eigen::Matrix2cd complex_hessian(const RealField& f, const G2Point& u,
                                 const FDOptions& fd)
{
    const CLD u1(u.u1()), u2(u.u2());
    const long double h = fd.step;
    const Eigen::Matrix2cd dh = complex_hessian_once(f, u1, u2, h);
    if (!fd.richardson) return dh;
    const Eigen::Matrix2cd dh2 = complex_hessian_once(f, u1, u2, h / 2);
    return (4.0 * dh2 - dh) / 3.0;
}

// log of the transported oracle determinant field,
// det B(u) = detLambda(r^2) / m^6 with m^2 = |1 - conj(z1) z2|^2.
RealField oracle_log_det_field(double lambda)
{
    const long double lam = lambda;
    return [lam](CLD u1, CLD u2) {
        const auto z = detail::quadratic_roots<long double>(u1, u2);
        const long double m2 = std::norm(CLD(1) - std::conj(z[0]) * z[1]);
        const long double r2 = std::norm(z[0] - z[1]) / m2;
        const long double det_lambda =
            detail::fundamental_curvature_closed<long double>(lam, r2).detB;
        return std::log(det_lambda) - 3 * std::log(m2);
    };
}

KEReport ke_run(const RealField& log_field, double lambda,
                const std::vector<G2Point>& points, const FDOptions& fd)
{
    fd.validate();
    if (points.size() < 2)
        throw DomainError("ke_test: at least two points are required");

    KEReport out;
    std::vector<Complex> all;
    for (const auto& p : points) {
        KEPointEstimate est;
        est.point = p;
        est.ricci = -complex_hessian(log_field, p, fd);
        est.metric = propagate_curvature(
                         [lambda](double r) {
                             return curvature_fundamental_closed(lambda, r).second;
                         },
                         p)
                         .entries;
        const double scale = est.metric.cwiseAbs().maxCoeff();
        const std::array<std::pair<int, int>, 3> entries{
            {{0, 0}, {1, 1}, {0, 1}}};
        for (const auto& [i, j] : entries) {
            if (std::abs(est.metric(i, j)) < 1e-6 * scale) continue;
            est.ratios.push_back(est.ricci(i, j) / est.metric(i, j));
        }
        all.insert(all.end(), est.ratios.begin(), est.ratios.end());
        out.c_estimates.push_back(std::move(est));
    }

    Complex mean(0.0);
    for (const auto& c : all) mean += c;
    mean /= static_cast<double>(all.size());
    double spread = 0.0;
    for (const auto& c : all) spread = std::max(spread, std::abs(c - mean));
    out.max_ratio_spread = spread / std::max(std::abs(mean), 1e-30);
    out.einstein_consistent = out.max_ratio_spread <= 0.01;
    return out;
}

double royal_det_series_form(double lambda, double nu, double x2)
{
    // Printed royal-diagonal display of det BB_s^(lambda,nu).
    return std::pow(lambda / 2.0, 2.0 * (nu + 2.0)) *
           (lambda + 1.0) * (lambda + 2.0) * (2.0 * lambda + 1.0) / 6.0 *
           std::pow(1.0 - x2, -4.0 * ((nu + 2.0) * (lambda + 1.0) + 2.0));
}

double royal_det_oracle(double lambda, double nu, double x2)
{
    // (B^(lambda) royal diagonal)^(2 nu + 4) times the transported closed
    // determinant det B(s(z,z)) = det B(0,0) / (1-|z|^2)^6.
    const double b = lambda / 2.0 * std::pow(1.0 - x2, -2.0 * lambda - 2.0);
    const double det0 =
        (lambda + 1.0) * (lambda + 1.0) * (2.0 * lambda + 1.0) / 6.0;
    return std::pow(b, 2.0 * nu + 4.0) * det0 * std::pow(1.0 - x2, -6.0);
}

void push_row(std::vector<AuditRow>& rows, const std::string& formula, double r,
              double paper, double oracle)
{
    const double gap =
        std::abs(paper - oracle) / std::max({std::abs(oracle), std::abs(paper), 1e-30});
    rows.push_back({formula, r, paper, oracle, gap});
}

void push_row_c(std::vector<AuditRow>& rows, const std::string& formula, double r,
                Complex paper, Complex oracle)
{
    const double gap =
        std::abs(paper - oracle) / std::max({std::abs(oracle), std::abs(paper), 1e-30});
    rows.push_back({formula, r, paper.real(), oracle.real(), gap});
}

} // namespace

void ModuleSpec::validate() const
{
    if (!(lambda > 0.0)) throw DomainError("ModuleSpec: lambda must be positive");
    if (family == ModuleFamily::WeightedPower) {
        if (!(nu > 0.0))
            throw DomainError("ModuleSpec: weighted-power nu must be positive");
    } else if (!(nu >= 0.0)) {
        throw DomainError("ModuleSpec: det-curvature nu must be >= 0");
    }
}

ModuleSpec ModuleSpec::parse(const std::string& text)
{
    ModuleSpec out;
    std::string body;
    if (text.starts_with("w:")) {
        out.family = ModuleFamily::WeightedPower;
        body = text.substr(2);
    } else if (text.starts_with("d:") || text.starts_with("h:")) {
        out.family = ModuleFamily::DetCurvature;
        body = text.substr(2);
    } else {
        throw DomainError("ModuleSpec: expected 'w:...' or 'd:...' in '" + text + "'");
    }
    double l = 0.0, n = 0.0;
    bool have_l = false, have_n = false;
    std::istringstream is(body);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw DomainError("ModuleSpec: bad parameter '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double val = std::stod(item.substr(eq + 1));
        if (key == "l" || key == "lambda") {
            l = val;
            have_l = true;
        } else if (key == "nu") {
            n = val;
            have_n = true;
        } else {
            throw DomainError("ModuleSpec: unknown parameter '" + key + "'");
        }
    }
    if (!have_l || !have_n)
        throw DomainError("ModuleSpec: both l and nu are required in '" + text + "'");
    out.lambda = l;
    out.nu = n;
    out.validate();
    return out;
}

std::string ModuleSpec::str() const
{
    std::ostringstream os;
    os << (family == ModuleFamily::WeightedPower ? "w:" : "d:") << "l=" << lambda
       << ",nu=" << nu;
    return os.str();
}

InvariantSignature signature(const ModuleSpec& m, const EvalOptions& opts)
{
    m.validate();
    InvariantSignature out;
    out.family = m.family;
    if (m.family == ModuleFamily::WeightedPower) {
        out.closed_pair = {m.nu * (m.lambda + 1.0), m.nu * m.lambda};
        out.paper_diagonal_exponent = 2.0 * m.nu * (m.lambda + 1.0);
        const KernelSpec spec =
            KernelSpec::power(KernelSpec::bergman(m.lambda), m.nu);
        out.numeric_diagonal_exponent = fit_exponent([&](double x) {
            const double z = std::sqrt(x);
            const G2Point u(2.0 * z, z * z);
            return eval_kernel(spec, u, u, opts).real();
        });
    } else {
        out.closed_pair = {(m.nu + 2.0) * (m.lambda + 1.0),
                           (2.0 * m.nu + 4.0) * m.lambda};
        out.paper_diagonal_exponent =
            4.0 * ((m.nu + 2.0) * (m.lambda + 1.0) + 2.0);
        const KernelSpec b = KernelSpec::bergman(m.lambda);
        out.numeric_diagonal_exponent = fit_exponent([&](double x) {
            const double z = std::sqrt(x);
            const G2Point u(2.0 * z, z * z);
            const double bpow = std::pow(eval_kernel(b, u, u, opts).real(),
                                         2.0 * m.nu + 4.0);
            return bpow * det_curvature(m.lambda, u, DetMethod::Oracle);
        });
    }
    return out;
}

ClassifyVerdict classify(const ModuleSpec& a, const ModuleSpec& b)
{
    a.validate();
    b.validate();
    const auto sa = signature(a), sb = signature(b);
    std::ostringstream w;
    if (a.family != b.family) {
        const double nu =
            (a.family == ModuleFamily::DetCurvature ? a.nu : b.nu);
        const auto q = cross_family_quadratic(nu);
        w << "cross-family: obstruction quadratic " << q.coefficients[0]
          << " l^2 + " << q.coefficients[1] << " l + " << q.coefficients[2]
          << " has no positive root (discriminant " << q.discriminant << ")";
        return {false, w.str()};
    }
    const char* names[2][2] = {{"nu(lambda+1)", "nu lambda"},
                               {"(nu+2)(lambda+1)", "(2nu+4) lambda"}};
    const int fi = a.family == ModuleFamily::WeightedPower ? 0 : 1;
    for (int k = 0; k < 2; ++k) {
        if (std::abs(sa.closed_pair[k] - sb.closed_pair[k]) > 1e-12) {
            w << names[fi][k] << ": " << sa.closed_pair[k] << " vs "
              << sb.closed_pair[k];
            return {false, w.str()};
        }
    }
    return {true, ""};
}

QuadraticReport cross_family_quadratic(double nu)
{
    if (!(nu >= 0.0))
        throw DomainError("cross_family_quadratic: nu must be >= 0");
    QuadraticReport out;
    out.coefficients = {nu, 5.0 - 4.0 * nu, 23.0 * nu + 35.0};
    out.discriminant = -76.0 * nu * nu - 180.0 * nu + 25.0;
    out.has_positive_root = false;
    const double a = out.coefficients[0], b = out.coefficients[1],
                 c = out.coefficients[2];
    if (std::abs(a) < 1e-14) {
        if (std::abs(b) > 1e-14) out.has_positive_root = -c / b > 1e-12;
    } else if (out.discriminant >= 0.0) {
        const double sq = std::sqrt(out.discriminant);
        out.has_positive_root =
            (-b + sq) / (2.0 * a) > 1e-12 || (-b - sq) / (2.0 * a) > 1e-12;
    }
    return out;
}

KEReport ke_test(double lambda, const std::vector<G2Point>& points,
                 const FDOptions& fd)
{
    if (!(lambda > 0.0)) throw DomainError("ke_test: lambda must be positive");
    return ke_run(oracle_log_det_field(lambda), lambda, points, fd);
}

KEReport ke_test_power_control(double lambda, double c,
                               const std::vector<G2Point>& points,
                               const FDOptions& fd, const EvalOptions& opts)
{
    if (!(lambda > 0.0)) throw DomainError("ke_test: lambda must be positive");
    const long double lam = lambda;
    const long double thr = opts.series_threshold;
    const int terms = opts.series_terms;
    const long double cl = c;
    const RealField field = [=](CLD u1, CLD u2) {
        const CLD b = detail::bergman_g2<long double>(lam, u1, u2, u1, u2, thr, terms);
        return cl * std::log(b.real());
    };
    return ke_run(field, lambda, points, fd);
}

std::vector<AuditRow> audit(double lambda, const std::vector<double>& r_grid,
                            double nu, const FDOptions& fd, const EvalOptions& opts)
{
    if (!(lambda > 0.0)) throw DomainError("audit: lambda must be positive");
    std::vector<AuditRow> rows;
    for (const double r : r_grid) {
        if (!(r >= 0.0 && r <= 0.9))
            throw DomainError("audit: grid values must lie in [0, 0.9]");

        const auto [b_closed, big_closed] = curvature_fundamental_closed(lambda, r);
        const CurvatureMatrix big_num =
            curvature_numeric(KernelSpec::bergman(lambda), G2Point(r, 0.0), fd, opts);
        const CurvatureMatrix b_num =
            curvature_to_bidisc(big_num, Disc2Point(Complex(r), Complex(0.0)));

        push_row_c(rows, "prop_curv:B11", r, big_closed.entries(0, 0),
                   big_num.entries(0, 0));
        push_row_c(rows, "prop_curv:B12", r, big_closed.entries(0, 1),
                   big_num.entries(0, 1));
        push_row_c(rows, "prop_curv:B22", r, big_closed.entries(1, 1),
                   big_num.entries(1, 1));
        push_row_c(rows, "prop_curv:b11", r, b_closed.entries(0, 0),
                   b_num.entries(0, 0));
        push_row_c(rows, "prop_curv:b12", r, b_closed.entries(0, 1),
                   b_num.entries(0, 1));
        push_row_c(rows, "prop_curv:b22", r, b_closed.entries(1, 1),
                   b_num.entries(1, 1));

        if (lambda == 1.0) {
            // At lambda = 1 the product-kernel forms are exact oracles.
            const double u = r * r;
            const double den = (1.0 - u) * (1.0 - u);
            push_row_c(rows, "prop_curv_lambda1:b11", r, b_closed.entries(0, 0),
                       Complex(1.0 / den));
            push_row_c(rows, "prop_curv_lambda1:b12", r, b_closed.entries(0, 1),
                       Complex(1.0));
            push_row_c(rows, "prop_curv_lambda1:b22", r, b_closed.entries(1, 1),
                       Complex(1.0));
            push_row_c(rows, "prop_curv_lambda1:B12", r, big_closed.entries(0, 1),
                       Complex(r * (u - 2.0) / den));
            push_row_c(rows, "prop_curv_lambda1:B22", r, big_closed.entries(1, 1),
                       Complex((2.0 - u) / den));
        }

        const double det_oracle = det_curvature_fundamental_closed(lambda, r);
        push_row(rows, "detcurv:ratio_form", r,
                 det_curvature_ratio_form(lambda, r), det_oracle);
        push_row(rows, "detcurv:weight_plus1", r,
                 det_curvature_weight_variant(lambda, r, 1), det_oracle);
        push_row(rows, "detcurv:weight_plus2", r,
                 det_curvature_weight_variant(lambda, r, 2), det_oracle);
        push_row(rows, "detcurv:numeric_cross_check", r,
                 big_num.entries.determinant().real(), det_oracle);

        const double x2 = r * r;  // royal rows reuse the grid as |z|
        push_row(rows, "royal_det:series_form", r,
                 royal_det_series_form(lambda, nu, x2),
                 royal_det_oracle(lambda, nu, x2));
    }
    return rows;
}

} // namespace g2kern
