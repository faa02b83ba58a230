#include "g2kern/homogeneity.hpp"

#include <cmath>
#include <numbers>

#include "g2kern/detail/kernel_eval.hpp"

namespace g2kern {

namespace {

// log q continued along the group path (t, alpha)(s) = (-e^{i s Delta}, s alpha)
// from the identity, where q = (phi(z1)-phi(z2))/(z1-z2) and q(id) = 1.
Complex tracked_log_q(const MoebiusMap& g, Complex z1, Complex z2, int steps)
{
    const double delta = std::arg(-g.t());
    const Complex alpha_g = g.alpha();
    const auto q_at = [&](double s) {
        const Complex t = -std::polar(1.0, s * delta);
        const Complex a = s * alpha_g;
        return t * (std::norm(a) - 1.0) /
               ((1.0 - std::conj(a) * z1) * (1.0 - std::conj(a) * z2));
    };

    double s_prev = 0.0;
    Complex q_prev(1.0);
    Complex lg(0.0);
    double ds = 1.0 / steps;
    const double ds_min = ds / 4096.0;
    while (s_prev < 1.0) {
        const double s = std::min(1.0, s_prev + ds);
        const Complex q = q_at(s);
        const Complex ratio = q / q_prev;
        if (std::abs(std::arg(ratio)) >= std::numbers::pi / 2.0) {
            ds /= 2.0;
            if (ds < ds_min)
                throw BranchTrackingError("multiplier_J: group path refinement cap");
            continue;
        }
        lg += std::log(ratio);
        s_prev = s;
        q_prev = q;
        ds = std::min(ds * 2.0, 1.0 / steps);
    }
    return lg;
}

double identity_residual_scale(const Eigen::Matrix2cd& k, double lhs, double rhs)
{
    return std::max({std::abs(lhs), std::abs(rhs), std::abs(k(0, 0)),
                     std::abs(k(1, 1)), 1e-30});
}

// Both fundamental-set identity residuals for one curvature matrix at (r, 0).
double criterion_residuals(const CurvatureMatrix& k, double r)
{
    const Complex k12 = k.entries(0, 1), k21 = k.entries(1, 0);
    const double off = std::abs(k12 - k21) /
                       std::max({std::abs(k12), std::abs(k21),
                                 std::abs(k.entries(0, 0)), 1e-30});
    const Complex lhs = r * (r * r - 2.0) * k.entries(0, 0);
    const Complex rhs = 2.0 * k12 + r * k.entries(1, 1);
    const double idr = std::abs(lhs - rhs) /
                       identity_residual_scale(k.entries, std::abs(lhs), std::abs(rhs));
    return std::max(off, idr);
}

// Power specs over a Bergman base reduce to a scale of the base curvature.
bool bergman_scale_of(const KernelSpec& spec, double& lambda, double& scale)
{
    if (const auto* wb = std::get_if<WeightedBergman>(&spec.family())) {
        lambda = wb->lambda;
        scale = 1.0;
        return true;
    }
    if (const auto* p = std::get_if<Power>(&spec.family())) {
        double inner_scale = 0.0;
        if (bergman_scale_of(*p->base, lambda, inner_scale)) {
            scale = inner_scale * p->nu;
            return true;
        }
    }
    return false;
}

} // namespace

MultiplierSpec MultiplierSpec::weighted_bergman(double lambda)
{
    return {(lambda + 1.0) / 2.0, 0.0};
}

MultiplierSpec MultiplierSpec::bergman_power(double lambda, double nu)
{
    return {nu * (lambda + 1.0) / 2.0, 0.0};
}

MultiplierSpec MultiplierSpec::symmetric_c(double lambda)
{
    return {lambda / 2.0, 0.0};
}

MultiplierSpec MultiplierSpec::det_curvature(double lambda, double nu)
{
    return {(lambda + 1.0) * (nu + 2.0), 1.0};
}

MultiplierSpec MultiplierSpec::for_spec(const KernelSpec& spec)
{
    return std::visit(
        [&](const auto& fam) -> MultiplierSpec {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, WeightedBergman>)
                return weighted_bergman(fam.lambda);
            else if constexpr (std::is_same_v<T, SymmetricC>)
                return symmetric_c(fam.lambda);
            else if constexpr (std::is_same_v<T, DetCurvature>)
                return det_curvature(fam.lambda, fam.nu);
            else if constexpr (std::is_same_v<T, Power>) {
                MultiplierSpec inner = for_spec(*fam.base);
                return {fam.nu * inner.kappa, fam.nu * inner.jacobian_power};
            } else if constexpr (std::is_same_v<T, Product>) {
                MultiplierSpec out{0.0, 0.0};
                for (const auto& f : fam.factors) {
                    const MultiplierSpec m = for_spec(f);
                    out.kappa += m.kappa;
                    out.jacobian_power += m.jacobian_power;
                }
                return out;
            } else {
                throw DomainError("MultiplierSpec: no scalar multiplier for a "
                                  "matrix-valued spec");
            }
        },
        spec.family());
}

Complex multiplier_J(const MultiplierSpec& mult, const AutomorphismMap& g,
                     const G2Point& u, int path_steps)
{
    const auto z = detail::quadratic_roots<double>(u.u1(), u.u2());
    const Complex lq = tracked_log_q(g.base(), z[0], z[1], path_steps);
    return std::exp((2.0 * mult.kappa + 3.0 * mult.jacobian_power) * lq);
}

ResidualReport quasi_invariance_residual(
    const KernelSpec& spec, const MultiplierSpec& mult, const AutomorphismMap& g,
    const std::vector<std::pair<G2Point, G2Point>>& sample, const EvalOptions& opts,
    std::uint64_t seed)
{
    if (sample.empty())
        throw DomainError("quasi_invariance_residual: empty sample");
    ResidualReport out;
    out.trials = static_cast<int>(sample.size());
    out.seed = seed;
    out.argmax_points = sample.front();
    for (const auto& [u, v] : sample) {
        const Complex k = eval_kernel(spec, u, v, opts);
        const G2Point gu = aut_apply(g, u), gv = aut_apply(g, v);
        const Complex kg = eval_kernel(spec, gu, gv, opts);
        const Complex ju = multiplier_J(mult, g, u, opts.branch_path_steps);
        const Complex jv = multiplier_J(mult, g, v, opts.branch_path_steps);
        const double resid =
            std::abs(k - ju * kg * std::conj(jv)) / std::max(std::abs(k), 1e-30);
        if (resid > out.max_relative_residual) {
            out.max_relative_residual = resid;
            out.argmax_points = {u, v};
        }
    }
    return out;
}

ResidualReport factorization_test_fn(const KernelFn& kernel, const AutomorphismMap& g,
                                     const std::vector<std::pair<G2Point, G2Point>>& sample,
                                     std::uint64_t seed,
                                     std::optional<std::pair<G2Point, G2Point>> base)
{
    if (sample.empty())
        throw DomainError("factorization_test: empty sample");

    const auto m_ratio = [&](const G2Point& u, const G2Point& v) {
        const Complex k = kernel(u, v);
        const Complex kg = kernel(aut_apply(g, u), aut_apply(g, v));
        if (std::abs(k) < 1e-14 || std::abs(kg) < 1e-14)
            throw NumericError("factorization_test: kernel below 1e-14 at a "
                               "sample point");
        return k / kg;
    };

    // Base pair, auto-rescued from the sample when degenerate.
    std::vector<std::pair<G2Point, G2Point>> candidates;
    candidates.push_back(
        base.value_or(std::make_pair(G2Point::origin(), G2Point(0.2, 0.0))));
    candidates.insert(candidates.end(), sample.begin(), sample.end());

    std::size_t base_idx = 0;
    Complex m00;
    for (;; ++base_idx) {
        if (base_idx >= candidates.size())
            throw NumericError("factorization_test: no usable base pair");
        try {
            m00 = m_ratio(candidates[base_idx].first, candidates[base_idx].second);
            break;
        } catch (const NumericError&) {
            continue;
        }
    }
    const G2Point u0 = candidates[base_idx].first;
    const G2Point v0 = candidates[base_idx].second;

    ResidualReport out;
    out.trials = static_cast<int>(sample.size());
    out.seed = seed;
    out.argmax_points = sample.front();
    for (const auto& [u, v] : sample) {
        const Complex lhs = m_ratio(u, v) * m00;
        const Complex rhs = m_ratio(u, v0) * m_ratio(u0, v);
        const double resid = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-30);
        if (resid > out.max_relative_residual) {
            out.max_relative_residual = resid;
            out.argmax_points = {u, v};
        }
    }
    return out;
}

ResidualReport factorization_test(const KernelSpec& spec, const AutomorphismMap& g,
                                  const std::vector<std::pair<G2Point, G2Point>>& sample,
                                  const EvalOptions& opts, std::uint64_t seed,
                                  std::optional<std::pair<G2Point, G2Point>> base)
{
    return factorization_test_fn(
        [&](const G2Point& u, const G2Point& v) { return eval_kernel(spec, u, v, opts); },
        g, sample, seed, std::move(base));
}

ResidualReport curvature_criterion(const KernelSpec& spec,
                                   const std::vector<double>& r_grid,
                                   CriterionMethod method, const FDOptions& fd,
                                   const EvalOptions& opts)
{
    ResidualReport out;
    out.trials = static_cast<int>(r_grid.size());
    for (const double r : r_grid) {
        if (!(r >= 0.0 && r <= 0.95))
            throw DomainError("curvature_criterion: grid values must lie in [0, 0.95]");
        CurvatureMatrix k;
        if (method == CriterionMethod::ClosedForm) {
            double lambda = 0.0, scale = 0.0;
            if (!bergman_scale_of(spec, lambda, scale))
                throw DomainError("curvature_criterion: closed forms exist only for "
                                  "the weighted Bergman family; use Numeric");
            k = curvature_fundamental_closed(lambda, r).second;
            k.entries *= scale;
        } else {
            k = curvature_numeric(spec, G2Point(r, 0.0), fd, opts);
        }
        const double resid = criterion_residuals(k, r);
        if (resid > out.max_relative_residual) {
            out.max_relative_residual = resid;
            out.argmax_points = {G2Point(r, 0.0), G2Point(r, 0.0)};
        }
    }
    return out;
}

ResidualReport curvature_criterion_fn(const KernelFn& kernel,
                                      const std::vector<double>& r_grid,
                                      const FDOptions& fd)
{
    ResidualReport out;
    out.trials = static_cast<int>(r_grid.size());
    for (const double r : r_grid) {
        if (!(r >= 0.0 && r <= 0.95))
            throw DomainError("curvature_criterion: grid values must lie in [0, 0.95]");
        const CurvatureMatrix k = curvature_numeric_fn(kernel, G2Point(r, 0.0), fd);
        const double resid = criterion_residuals(k, r);
        if (resid > out.max_relative_residual) {
            out.max_relative_residual = resid;
            out.argmax_points = {G2Point(r, 0.0), G2Point(r, 0.0)};
        }
    }
    return out;
}

double reconstruct_from_fundamental(const std::function<double(double)>& k_on_lambda,
                                    const MultiplierSpec& mult, const G2Point& u,
                                    int path_steps)
{
    const auto reconstruct = [&](RootOrder order) {
        const auto fd = to_fundamental(u, order);
        if (fd.g.is_identity()) return k_on_lambda(fd.r);
        // J(g, (r,0)) evaluated at the fundamental-set preimage {r, 0}.
        const Complex lq =
            tracked_log_q(fd.g.base(), Complex(fd.r), Complex(0.0), path_steps);
        const double lg_abs2 =
            2.0 * (2.0 * mult.kappa + 3.0 * mult.jacobian_power) * lq.real();
        return k_on_lambda(fd.r) * std::exp(-lg_abs2);
    };
    const double a = reconstruct(RootOrder::Canonical);
    const double b = reconstruct(RootOrder::Swapped);
    if (std::abs(a - b) > 1e-10 * std::max({std::abs(a), std::abs(b), 1e-30}))
        throw NumericError("reconstruct_from_fundamental: value depends on the "
                           "preimage ordering");
    return a;
}

CurvatureMatrix propagate_curvature(
    const std::function<CurvatureMatrix(double)>& k_matrix_on_lambda,
    const G2Point& u)
{
    const auto fd = to_fundamental(u);
    CurvatureMatrix on_lambda = k_matrix_on_lambda(fd.r);
    on_lambda.base1 = fd.r;
    on_lambda.base2 = 0.0;
    on_lambda.chart = Chart::G2;

    const CurvatureMatrix out = curvature_transport(on_lambda, fd.g);

    // Independence of the decomposing automorphism, via the stabilizer.
    const AutomorphismMap h =
        fd.r > 0.0
            ? fd.g * AutomorphismMap(MoebiusMap::involution(DiscPoint(fd.r)))
            : fd.g * AutomorphismMap(MoebiusMap::rotation(0.7));
    const CurvatureMatrix alt = curvature_transport(on_lambda, h);
    const double scale = out.entries.cwiseAbs().maxCoeff();
    if ((out.entries - alt.entries).cwiseAbs().maxCoeff() >
        1e-9 * std::max(scale, 1e-30))
        throw NumericError("propagate_curvature: transport depends on the choice "
                           "of automorphism (stabilizer identity violated)");
    return out;
}

} // namespace g2kern
