#include "g2kern/kernels.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "g2kern/detail/kernel_eval.hpp"
#include "g2kern/detail/polarized_fd.hpp"

namespace g2kern {

namespace {

using CLD = std::complex<long double>;

bool near_integer(double x, long& n)
{
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12) {
        n = static_cast<long>(r);
        return true;
    }
    return false;
}

Complex int_pow(Complex base, long n)
{
    Complex out(1.0);
    for (long i = 0; i < n; ++i) out *= base;
    return out;
}

std::string fmt_double(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& ctx)
{
    char* end = nullptr;
    const std::string tmp(s);
    const double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || tmp.empty())
        throw DomainError("kernel spec: bad number '" + tmp + "' in " + ctx);
    return v;
}

// "l=2,nu=1.5" -> {l: 2, nu: 1.5}
std::map<std::string, double> parse_params(std::string_view s, const std::string& ctx)
{
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string_view::npos) comma = s.size();
        const std::string_view item = s.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw DomainError("kernel spec: expected key=value in " + ctx);
        out[std::string(item.substr(0, eq))] =
            parse_double(item.substr(eq + 1), ctx);
        pos = comma + 1;
    }
    return out;
}

bool lex_less(const G2Point& a, const G2Point& b)
{
    const std::array<double, 4> ka{a.u1().real(), a.u1().imag(), a.u2().real(),
                                   a.u2().imag()};
    const std::array<double, 4> kb{b.u1().real(), b.u1().imag(), b.u2().real(),
                                   b.u2().imag()};
    return ka < kb;
}

// Power specs flattened to (non-power base, total exponent).
std::pair<const KernelSpec*, double> resolve_power(const Power& p)
{
    double nu = p.nu;
    const KernelSpec* base = p.base.get();
    while (const auto* inner = std::get_if<Power>(&base->family())) {
        nu *= inner->nu;
        base = inner->base.get();
    }
    return {base, nu};
}

std::array<CLD, 4> bergman_polarized_ld(double lambda, const G2Point& u,
                                        const G2Point& v, const EvalOptions& opts,
                                        long double* err_out = nullptr)
{
    return detail::bergman_polarized_raw<long double>(
        lambda, CLD(u.u1()), CLD(u.u2()), CLD(v.u1()), CLD(v.u2()),
        static_cast<long double>(opts.fd_step),
        static_cast<long double>(opts.series_threshold), opts.series_terms,
        detail::BergmanPath::Auto, err_out);
}

Complex eval_scalar_impl(const KernelSpec& spec, const G2Point& u, const G2Point& v,
                         const EvalOptions& opts);

Complex eval_power_impl(const KernelSpec& base, double nu, const G2Point& u,
                        const G2Point& v, const EvalOptions& opts)
{
    if (!(nu > 0.0))
        throw DomainError("eval_power: exponent must be positive");
    long n = 0;
    if (near_integer(nu, n) && n >= 1)
        return int_pow(eval_scalar_impl(base, u, v, opts), n);

    if (const auto* wb = std::get_if<WeightedBergman>(&base.family())) {
        const CLD lg = detail::bergman_log_ray<long double>(
            wb->lambda, CLD(u.u1()), CLD(u.u2()), CLD(v.u1()), CLD(v.u2()),
            opts.series_threshold, opts.series_terms, opts.branch_path_steps);
        const CLD val = std::exp(static_cast<long double>(nu) * lg);
        return Complex(static_cast<double>(val.real()), static_cast<double>(val.imag()));
    }
    if (std::holds_alternative<SymmetricC>(base.family()))
        throw UnsupportedPowerError(
            "eval_power: non-integer powers of C^(lambda) are refused; its "
            "non-vanishing on G_2 x G_2 is not established");
    throw UnsupportedPowerError(
        "eval_power: non-integer powers are only defined for non-vanishing "
        "bases (weighted Bergman)");
}

Complex eval_scalar_impl(const KernelSpec& spec, const G2Point& u, const G2Point& v,
                         const EvalOptions& opts)
{
    return std::visit(
        [&](const auto& fam) -> Complex {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, WeightedBergman>) {
                return detail::bergman_g2<double>(fam.lambda, u.u1(), u.u2(),
                                                  v.u1(), v.u2(),
                                                  opts.series_threshold,
                                                  opts.series_terms);
            } else if constexpr (std::is_same_v<T, SymmetricC>) {
                return detail::symmetric_c_g2<double>(fam.lambda, u.u1(), u.u2(),
                                                      v.u1(), v.u2());
            } else if constexpr (std::is_same_v<T, Power>) {
                const auto [base, nu] = resolve_power(fam);
                return eval_power_impl(*base, nu, u, v, opts);
            } else if constexpr (std::is_same_v<T, DetCurvature>) {
                const auto bb = bergman_polarized_ld(fam.lambda, u, v, opts);
                const CLD det = bb[0] * bb[3] - bb[1] * bb[2];
                const Complex bpow = eval_power_impl(
                    KernelSpec::bergman(fam.lambda), 2.0 * fam.nu + 4.0, u, v, opts);
                return bpow * Complex(static_cast<double>(det.real()),
                                      static_cast<double>(det.imag()));
            } else if constexpr (std::is_same_v<T, Product>) {
                Complex out(1.0);
                for (const auto& f : fam.factors)
                    out *= eval_scalar_impl(f, u, v, opts);
                return out;
            } else {
                throw DomainError(
                    "eval_kernel: matrix-valued spec passed to the scalar "
                    "evaluator; use eval_kernel_matrix");
            }
        },
        spec.family());
}

} // namespace

void EvalOptions::validate() const
{
    if (!(series_threshold > 0.0 && series_threshold < 0.5))
        throw DomainError("EvalOptions: series_threshold must lie in (0, 0.5)");
    if (series_terms < 8)
        throw DomainError("EvalOptions: series_terms must be >= 8");
    if (branch_path_steps < 1)
        throw DomainError("EvalOptions: branch_path_steps must be >= 1");
    if (!(fd_step >= 1e-7 && fd_step <= 1e-2))
        throw DomainError("EvalOptions: fd_step must lie in [1e-7, 1e-2]");
}

KernelSpec::KernelSpec(Family family) : family_(std::move(family))
{
    std::visit(
        [](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, WeightedBergman> ||
                          std::is_same_v<T, SymmetricC> ||
                          std::is_same_v<T, MatrixCurvature>) {
                if (!(fam.lambda > 0.0))
                    throw DomainError("KernelSpec: lambda must be positive");
            } else if constexpr (std::is_same_v<T, Power>) {
                if (!fam.base) throw DomainError("KernelSpec: power without base");
                if (!(fam.nu > 0.0))
                    throw DomainError("KernelSpec: power exponent must be positive");
                if (fam.base->matrix_valued())
                    throw DomainError("KernelSpec: powers of matrix kernels");
            } else if constexpr (std::is_same_v<T, DetCurvature>) {
                if (!(fam.lambda > 0.0))
                    throw DomainError("KernelSpec: lambda must be positive");
                if (!(fam.nu >= 0.0))
                    throw DomainError("KernelSpec: det-curvature nu must be >= 0");
            } else if constexpr (std::is_same_v<T, Product>) {
                if (fam.factors.empty())
                    throw DomainError("KernelSpec: empty product");
                for (const auto& f : fam.factors)
                    if (f.matrix_valued())
                        throw DomainError("KernelSpec: product of matrix kernels");
            }
        },
        family_);
}

KernelSpec KernelSpec::bergman(double lambda)
{
    return KernelSpec(WeightedBergman{lambda});
}

KernelSpec KernelSpec::power(KernelSpec base, double nu)
{
    return KernelSpec(Power{std::make_shared<const KernelSpec>(std::move(base)), nu});
}

KernelSpec KernelSpec::symmetric_c(double lambda)
{
    return KernelSpec(SymmetricC{lambda});
}

KernelSpec KernelSpec::det_curvature(double lambda, double nu)
{
    return KernelSpec(DetCurvature{lambda, nu});
}

KernelSpec KernelSpec::matrix_curvature(double lambda)
{
    return KernelSpec(MatrixCurvature{lambda});
}

KernelSpec KernelSpec::product(std::vector<KernelSpec> factors)
{
    return KernelSpec(Product{std::move(factors)});
}

KernelSpec KernelSpec::parse(const std::string& text)
{
    const auto param = [&](std::string_view body, const char* key) {
        auto params = parse_params(body, text);
        const auto it = params.find(key);
        if (it == params.end())
            throw DomainError("kernel spec: missing parameter '" +
                              std::string(key) + "' in " + text);
        return it->second;
    };

    if (text.starts_with("bergman:"))
        return bergman(param(std::string_view(text).substr(8), "l"));
    if (text.starts_with("symC:"))
        return symmetric_c(param(std::string_view(text).substr(5), "l"));
    if (text.starts_with("matcurv:"))
        return matrix_curvature(param(std::string_view(text).substr(8), "l"));
    if (text.starts_with("detcurv:")) {
        const std::string_view body = std::string_view(text).substr(8);
        return det_curvature(param(body, "l"), param(body, "nu"));
    }
    if (text.starts_with("power:")) {
        const std::string rest = text.substr(6);
        const std::size_t pos = rest.rfind(",nu=");
        if (pos == std::string::npos)
            throw DomainError("kernel spec: power without ',nu=' in " + text);
        return power(parse(rest.substr(0, pos)),
                     parse_double(std::string_view(rest).substr(pos + 4), text));
    }
    if (text.starts_with("product:[") && text.ends_with("]")) {
        const std::string body = text.substr(9, text.size() - 10);
        std::vector<KernelSpec> factors;
        int depth = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i == body.size() || (body[i] == ';' && depth == 0)) {
                if (i > start) factors.push_back(parse(body.substr(start, i - start)));
                start = i + 1;
            } else if (body[i] == '[') {
                ++depth;
            } else if (body[i] == ']') {
                --depth;
            }
        }
        return product(std::move(factors));
    }
    throw DomainError("kernel spec: unknown family in '" + text + "'");
}

std::string KernelSpec::str() const
{
    return std::visit(
        [&](const auto& fam) -> std::string {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, WeightedBergman>)
                return "bergman:l=" + fmt_double(fam.lambda);
            else if constexpr (std::is_same_v<T, SymmetricC>)
                return "symC:l=" + fmt_double(fam.lambda);
            else if constexpr (std::is_same_v<T, MatrixCurvature>)
                return "matcurv:l=" + fmt_double(fam.lambda);
            else if constexpr (std::is_same_v<T, DetCurvature>)
                return "detcurv:l=" + fmt_double(fam.lambda) +
                       ",nu=" + fmt_double(fam.nu);
            else if constexpr (std::is_same_v<T, Power>)
                return "power:" + fam.base->str() + ",nu=" + fmt_double(fam.nu);
            else {
                std::string out = "product:[";
                for (std::size_t i = 0; i < fam.factors.size(); ++i) {
                    if (i) out += ';';
                    out += fam.factors[i].str();
                }
                return out + "]";
            }
        },
        family_);
}

bool KernelSpec::matrix_valued() const
{
    return std::holds_alternative<MatrixCurvature>(family_);
}

Complex eval_kernel(const KernelSpec& spec, const G2Point& u, const G2Point& v,
                    const EvalOptions& opts)
{
    opts.validate();
    if (spec.matrix_valued())
        throw DomainError("eval_kernel: spec is matrix valued; use eval_kernel_matrix");
    if (lex_less(v, u)) return std::conj(eval_scalar_impl(spec, v, u, opts));
    return eval_scalar_impl(spec, u, v, opts);
}

Eigen::Matrix2cd eval_kernel_matrix(const KernelSpec& spec, const G2Point& u,
                                    const G2Point& v, const EvalOptions& opts)
{
    opts.validate();
    const auto* mc = std::get_if<MatrixCurvature>(&spec.family());
    if (!mc)
        throw DomainError("eval_kernel_matrix: spec is scalar valued");
    if (lex_less(v, u))
        return eval_kernel_matrix(spec, v, u, opts).adjoint().eval();

    const auto bb = bergman_polarized_ld(mc->lambda, u, v, opts);
    const Complex scale = eval_power_impl(KernelSpec::bergman(mc->lambda),
                                          mc->lambda + 2.0, u, v, opts);
    Eigen::Matrix2cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = scale * Complex(static_cast<double>(bb[i * 2 + j].real()),
                                        static_cast<double>(bb[i * 2 + j].imag()));
    return out;
}

Complex eval_bergman_raw(double lambda, const Disc2Point& z, const Disc2Point& w)
{
    return detail::bergman_raw_zw<double>(lambda, z.z1().value(), z.z2().value(),
                                          w.z1().value(), w.z2().value());
}

Complex eval_bergman_series(double lambda, const Disc2Point& z, const Disc2Point& w,
                            const EvalOptions& opts)
{
    opts.validate();
    return detail::bergman_series_zw<double>(lambda, z.z1().value(), z.z2().value(),
                                             w.z1().value(), w.z2().value(),
                                             opts.series_terms);
}

Complex eval_symmetric(double lambda, const G2Point& u, const G2Point& v)
{
    if (!(lambda > 0.0)) throw DomainError("eval_symmetric: lambda must be positive");
    return detail::symmetric_c_g2<double>(lambda, u.u1(), u.u2(), v.u1(), v.u2());
}

Complex eval_power(const KernelSpec& base, double nu, const G2Point& u,
                   const G2Point& v, const EvalOptions& opts)
{
    opts.validate();
    if (lex_less(v, u)) return std::conj(eval_power(base, nu, v, u, opts));
    return eval_power_impl(base, nu, u, v, opts);
}

Eigen::Matrix2cd bergman_curvature_polarized(double lambda, const G2Point& u,
                                             const G2Point& v, const EvalOptions& opts)
{
    opts.validate();
    const auto bb = bergman_polarized_ld(lambda, u, v, opts);
    Eigen::Matrix2cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = Complex(static_cast<double>(bb[i * 2 + j].real()),
                                static_cast<double>(bb[i * 2 + j].imag()));
    return out;
}

double eval_H(double lambda, const Disc2Point& z, const EvalOptions& opts)
{
    opts.validate();
    const long double lam = lambda;
    const CLD z1(z.z1().value()), z2(z.z2().value());
    const long double d = std::abs(z1 - z2);
    const long double m2 = std::norm(CLD(1) - std::conj(z1) * z2);
    const long double rho = (1 - std::norm(z1)) * (1 - std::norm(z2));

    if (d >= 1e-2L) {
        const CLD b = detail::bergman_zw<long double>(
            lam, z1, z2, z1, z2, opts.series_threshold, opts.series_terms);
        const long double num =
            b.real() * (std::pow(m2, lam + 1) + std::pow(rho, lam + 1)) - lam;
        return static_cast<double>(num / (d * d * d * d));
    }

    // Series inside the diagonal tube: lead + sum_{p>=3} c_p x^(p-2) with
    // x = |z1 - z2|^2 / rho, all against the common factor rho^(l-2)/m2^l.
    const long double x = d * d / rho;
    long double sum = lam * (lam + 1) * (2 * lam + 1) / 12.0L;
    long double xp = 1.0L;
    for (int p = 3; p <= 400; ++p) {
        xp *= x;
        long double conv = 0.0L;
        for (int m = 1; m <= p - 1; ++m)
            conv += detail::binom<long double>(lam, m + 1) *
                    detail::binom<long double>(lam + 1, p - m);
        const long double cp = -lam * detail::binom<long double>(lam, p) +
                               lam / 2 * detail::binom<long double>(lam + 1, p) +
                               detail::binom<long double>(lam, p + 1) + conv / 2;
        const long double term = cp * xp;
        sum += term;
        if (std::abs(term) <= 1e-20L * std::abs(sum)) break;
    }
    return static_cast<double>(std::pow(rho, lam - 2) / std::pow(m2, lam) * sum);
}

SeriesAuditRecord h_coefficients(double lambda, int p)
{
    if (p < 3) throw DomainError("h_coefficients: p must be >= 3");
    SeriesAuditRecord out;
    out.lambda = lambda;
    out.p = p;
    const double t1 = -lambda * binomial(lambda, p);
    const double t2 = lambda / 2.0 * binomial(lambda + 1.0, p);
    const double t3 = binomial(lambda, p + 1);
    double conv = 0.0;
    for (int m = 1; m <= p - 1; ++m)
        conv += binomial(lambda, m + 1) * binomial(lambda + 1.0, p - m);
    const double t4 = conv / 2.0;
    out.coefficient = t1 + t2 + t3 + t4;
    out.helper_values = {{"term_neg_lambda_binom", t1},
                         {"term_half_lambda_binom", t2},
                         {"term_binom_p_plus_1", t3},
                         {"term_convolution", t4}};
    return out;
}

SeriesAuditRecord inequiv_proof_helpers(double lambda, double x)
{
    if (!(x > 0.0 && x < 1.0))
        throw DomainError("inequiv_proof_helpers: x must lie in (0, 1)");
    const double u = x * x;
    const double q = std::pow(1.0 - u, lambda);
    const double q1 = std::pow(1.0 - u, lambda + 1.0);
    const double s = 1.0 - q - lambda * u * q;  // recurring bracket
    const double g1 = (1.0 + lambda * u - (1.0 + lambda * u) * (1.0 + lambda * u) * q) *
                      (1.0 + q1);
    const double g2 = (lambda + 1.0) * s;
    const double g3 = s * s * (1.0 + q1) * (1.0 + q1);
    const double g4 = (lambda + 1.0) * (1.0 + q1) * (1.0 - q) * s;
    const double ltilde = (1.0 - q) * (1.0 + q1) - 2.0 * lambda * u * q;
    const double lval = ltilde / (2.0 * u * q);

    SeriesAuditRecord out;
    out.lambda = lambda;
    out.p = 2;
    out.coefficient = lambda * (lambda + 1.0) * (2.0 * lambda + 1.0) / 12.0;
    out.helper_values = {
        {"G1", g1},
        {"G2", g2},
        {"G3", g3},
        {"G4", g4},
        {"Ltilde", ltilde},
        {"L", lval},
        {"b22", detail::fundamental_curvature_closed<double>(lambda, u).b22}};
    return out;
}

double binomial(double lambda, int k)
{
    if (k < 0) throw DomainError("binomial: k must be >= 0");
    return detail::binom<double>(lambda, k);
}

} // namespace g2kern
