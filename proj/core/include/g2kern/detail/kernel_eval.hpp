#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "g2kern/errors.hpp"
#include "g2kern/geometry.hpp"

// Evaluation core shared by the double precision public API and the
// long double internals of the finite difference oracles.

namespace g2kern::detail {

template <class R>
using Cx = std::complex<R>;

// Generalized binomial coefficient binom(lambda, k) as a falling-factorial
// product; exact zeros for integer lambda < k.
template <class R>
R binom(R lambda, int k)
{
    R b(1);
    for (int j = 0; j < k; ++j) b *= (lambda - R(j)) / R(j + 1);
    return b;
}

// Pochhammer symbol (a)_k = a (a+1) ... (a+k-1).
template <class R>
R pochhammer(R a, int k)
{
    R p(1);
    for (int j = 0; j < k; ++j) p *= a + R(j);
    return p;
}

// base^expo with the principal branch; every base passed here is of the
// form 1 - z*conj(w) with z, w in the disc, so Re(base) > 0.
template <class R>
Cx<R> factor_pow(Cx<R> base, R expo)
{
    return std::exp(expo * std::log(base));
}

enum class BergmanPath { Auto, Raw, Series };

// Two-term bracket formula of the weighted Bergman kernel, in bidisc
// coordinates.  Valid away from the diagonals; the caller is expected to
// switch to the series once |z1-z2||w1-w2| drops below the threshold.
template <class R>
Cx<R> bergman_raw_zw(R lambda, Cx<R> z1, Cx<R> z2, Cx<R> w1, Cx<R> w2,
                     bool flag_cancellation = true)
{
    const Cx<R> one(1);
    const Cx<R> t1 = factor_pow(one - z1 * std::conj(w1), -lambda) *
                     factor_pow(one - z2 * std::conj(w2), -lambda);
    const Cx<R> t2 = factor_pow(one - z1 * std::conj(w2), -lambda) *
                     factor_pow(one - z2 * std::conj(w1), -lambda);
    const Cx<R> diff = t1 - t2;
    if (flag_cancellation &&
        std::abs(diff) < R(1e-12) * std::max(std::abs(t1), std::abs(t2)))
        throw CancellationError(
            "eval_bergman_raw: bracket terms agree to more than 12 digits");
    return diff / (R(2) * (z1 - z2) * (std::conj(w1) - std::conj(w2)));
}

// Diagonal-safe series of the weighted Bergman kernel.  Terminates exactly
// after lambda terms for integer lambda.
template <class R>
Cx<R> bergman_series_zw(R lambda, Cx<R> z1, Cx<R> z2, Cx<R> w1, Cx<R> w2,
                        int max_terms = 200, R reltol = R(1e-18))
{
    const Cx<R> one(1);
    const Cx<R> d11 = one - z1 * std::conj(w1);
    const Cx<R> d22 = one - z2 * std::conj(w2);
    const Cx<R> d12 = one - z1 * std::conj(w2);
    const Cx<R> d21 = one - z2 * std::conj(w1);
    const Cx<R> y = (z1 - z2) * (std::conj(w1) - std::conj(w2)) / (d11 * d22);

    Cx<R> term(lambda);  // binom(lambda, 1)
    Cx<R> sum = term;
    bool converged = false;
    for (int n = 0; n < max_terms; ++n) {
        const R c = (lambda - R(n + 1)) / R(n + 2);
        if (c == R(0)) {  // integer lambda: the series is a polynomial
            converged = true;
            break;
        }
        term *= c * y;
        sum += term;
        if (!std::isfinite(std::abs(term)))
            throw NonConvergenceError("eval_bergman_series: series diverged");
        if (std::abs(term) <= reltol * std::abs(sum)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NonConvergenceError("eval_bergman_series: term cap reached");
    return factor_pow(d12, -lambda) * factor_pow(d21, -lambda) * sum /
           (R(2) * d11 * d22);
}

template <class R>
Cx<R> bergman_zw(R lambda, Cx<R> z1, Cx<R> z2, Cx<R> w1, Cx<R> w2,
                 R threshold, int max_terms, BergmanPath path = BergmanPath::Auto)
{
    if (path == BergmanPath::Auto)
        path = (std::abs(z1 - z2) * std::abs(w1 - w2) < threshold)
                   ? BergmanPath::Series
                   : BergmanPath::Raw;
    return path == BergmanPath::Series
               ? bergman_series_zw(lambda, z1, z2, w1, w2, max_terms)
               : bergman_raw_zw(lambda, z1, z2, w1, w2);
}

// Weighted Bergman kernel in G_2 coordinates.
template <class R>
Cx<R> bergman_g2(R lambda, Cx<R> u1, Cx<R> u2, Cx<R> v1, Cx<R> v2,
                 R threshold, int max_terms, BergmanPath path = BergmanPath::Auto)
{
    const auto z = quadratic_roots<R>(u1, u2);
    const auto w = quadratic_roots<R>(v1, v2);
    return bergman_zw(lambda, z[0], z[1], w[0], w[1], threshold, max_terms, path);
}

// Reproducing kernel of the symmetric part, C^(lambda).
template <class R>
Cx<R> symmetric_c_g2(R lambda, Cx<R> u1, Cx<R> u2, Cx<R> v1, Cx<R> v2)
{
    const auto z = quadratic_roots<R>(u1, u2);
    const auto w = quadratic_roots<R>(v1, v2);
    const Cx<R> one(1);
    const Cx<R> a = factor_pow(one - z[0] * std::conj(w[0]), -lambda) *
                    factor_pow(one - z[1] * std::conj(w[1]), -lambda);
    const Cx<R> b = factor_pow(one - z[0] * std::conj(w[1]), -lambda) *
                    factor_pow(one - z[1] * std::conj(w[0]), -lambda);
    return (a + b) / R(2);
}

// log B^(lambda)((t u, t v)) continued along the ray t in [0, 1] from the real
// value log(lambda/2) at the origin (G_2 is starlike about 0).  Step count is
// refined until consecutive phase jumps stay below pi/2.
template <class R>
Cx<R> bergman_log_ray(R lambda, Cx<R> u1, Cx<R> u2, Cx<R> v1, Cx<R> v2,
                      R threshold, int max_terms, int steps)
{
    const auto at = [&](R t) {
        return bergman_g2(lambda, t * u1, t * u2, t * v1, t * v2, threshold,
                          max_terms);
    };
    const R half_pi = std::acos(R(0));
    R t_prev(0);
    Cx<R> k_prev(lambda / R(2));
    Cx<R> lg = std::log(k_prev);
    R dt = R(1) / R(steps);
    const R dt_min = dt / R(4096);
    while (t_prev < R(1)) {
        const R t = std::min(R(1), t_prev + dt);
        const Cx<R> k = at(t);
        const Cx<R> ratio = k / k_prev;
        if (std::abs(std::arg(ratio)) >= half_pi) {
            dt /= R(2);
            if (dt < dt_min)
                throw BranchTrackingError("eval_power: ray refinement cap hit");
            continue;
        }
        lg += std::log(ratio);
        t_prev = t;
        k_prev = k;
        dt = std::min(dt * R(2), R(1) / R(steps));
    }
    return lg;
}

// Small-u series of a = 1 - (1-u)^lambda (1 + lambda u); leading term
// lambda(lambda+1) u^2 / 2.
template <class R>
R b11_numerator_stable(R lambda, R u)
{
    if (u >= R(1e-3))
        return -std::expm1(lambda * std::log1p(-u) + std::log1p(lambda * u));
    R sum(0), up = u;
    for (int k = 2; k <= 40; ++k) {
        up *= u;
        const R sgn = (k % 2 == 0) ? R(1) : R(-1);
        const R ak = -sgn * (binom(lambda, k) - lambda * binom(lambda, k - 1));
        const R term = ak * up;
        sum += term;
        if (std::abs(term) <= R(1e-24) * std::abs(sum)) break;
    }
    return sum;
}

// Small-u series of (lambda+1) u (2-u) (1-u)^lambda - 1 + (1-u)^(2 lambda + 2),
// the numerator of b12 - b11; leading term -lambda(lambda+1)(lambda+2) u^3 / 3.
template <class R>
R b12_minus_b11_numerator_stable(R lambda, R u)
{
    if (u >= R(1e-3)) {
        const R lg1mu = std::log1p(-u);
        const R q = std::exp(lambda * lg1mu);
        return (lambda + 1) * u * (2 - u) * q + std::expm1((2 * lambda + 2) * lg1mu);
    }
    R sum(0), up = u * u;
    for (int k = 3; k <= 40; ++k) {
        up *= u;
        const R sgn = (k % 2 == 0) ? R(-1) : R(1);  // (-1)^(k-1)
        const R ck = sgn * (lambda + 1) *
                         (2 * binom(lambda, k - 1) + binom(lambda, k - 2)) -
                     sgn * binom(2 * lambda + 2, k);
        const R term = ck * up;
        sum += term;
        if (std::abs(term) <= R(1e-24) * std::abs(sum)) break;
    }
    return sum;
}

// Ltilde = (1 - (1-u)^lambda)(1 + (1-u)^(lambda+1)) - 2 lambda u (1-u)^lambda;
// leading term lambda(lambda+1)(2 lambda + 1) u^3 / 6.
template <class R>
R ltilde_stable(R lambda, R u)
{
    if (u >= R(1e-3)) {
        const R lg1mu = std::log1p(-u);
        const R q = std::exp(lambda * lg1mu);
        const R q1 = q * (1 - u);
        return -std::expm1(lambda * lg1mu) * (1 + q1) - 2 * lambda * u * q;
    }
    R sum(0), up = u * u;
    for (int k = 3; k <= 40; ++k) {
        up *= u;
        const auto p = [&](int j) {  // 1 - (1-u)^lambda
            return (j % 2 == 1 ? R(1) : R(-1)) * binom(lambda, j);
        };
        const auto s = [&](int j) {  // (1-u)^(lambda+1)
            return (j % 2 == 0 ? R(1) : R(-1)) * binom(lambda + 1, j);
        };
        R tk = 2 * p(k);
        for (int j = 1; j <= k - 1; ++j) tk += p(j) * s(k - j);
        tk -= 2 * lambda * (k % 2 == 1 ? R(1) : R(-1)) * binom(lambda, k - 1);
        const R term = tk * up;
        sum += term;
        if (std::abs(term) <= R(1e-24) * std::abs(sum)) break;
    }
    return sum;
}

// Closed-form curvature data of B^(lambda) on the fundamental set, as a
// function of u = r^2.  b_* are the bidisc-chart entries at (r, 0) in D^2,
// B_* the G_2-chart entries at (r, 0) in G_2.
template <class R>
struct FundamentalCurvature {
    R b11, b12, b22;
    R B11, B12, B22;
    R detB;
};

template <class R>
FundamentalCurvature<R> fundamental_curvature_closed(R lambda, R u)
{
    FundamentalCurvature<R> out;
    if (u <= R(0)) {
        const R b = (lambda + 1) / R(2);
        out.b11 = out.b12 = out.b22 = b;
        out.B11 = b;
        out.B12 = R(0);
        out.B22 = (lambda + 1) * (2 * lambda + 1) / R(3);
        out.detB = out.B11 * out.B22;
        return out;
    }
    const R omq = -std::expm1(lambda * std::log1p(-u));  // 1 - (1-u)^lambda
    const R den = (1 - u) * (1 - u) * omq * omq;
    out.b11 = lambda * b11_numerator_stable(lambda, u) / den;
    const R n1 = lambda * b12_minus_b11_numerator_stable(lambda, u) / den;
    out.b12 = out.b11 + n1;
    out.b22 = (1 - u) * (1 - u) * out.b11;
    out.B11 = out.b11;
    out.B12 = n1 / std::sqrt(u);
    out.B22 = -(2 - u) * out.b11 - 2 * n1 / u;
    out.detB = out.B11 * out.B22 - out.B12 * out.B12;
    return out;
}

// B^(mu)((r,0),(r,0)) as a function of u = r^2.
template <class R>
R bergman_fundamental_diag(R mu, R u)
{
    if (u <= R(0)) return mu / R(2);
    const R lg1mu = std::log1p(-u);
    return -std::expm1(mu * lg1mu) / (R(2) * u * std::exp(mu * lg1mu));
}

} // namespace g2kern::detail
