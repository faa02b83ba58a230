#pragma once

#include <array>
#include <limits>
#include <cmath>
#include <complex>

#include "g2kern/detail/kernel_eval.hpp"
#include "g2kern/errors.hpp"

// Nested central differences for the mixed derivatives
// d_{u_i} dbar_{v_j} log K(u, v) of a sesquiholomorphic kernel.  The
// antiholomorphic slot is differenced with a real step h, which moves
// conj(v_j) by h.  Entries are indexed [i][j] flattened as i*2+j.

namespace g2kern::detail {

template <class R, class LogF>
std::array<std::complex<R>, 4> mixed_fd_once(LogF&& logk, std::complex<R> u1,
                                             std::complex<R> u2, std::complex<R> v1,
                                             std::complex<R> v2, R h)
{
    using C = std::complex<R>;
    // logk evaluated on the 4x4 grid of single-coordinate shifts.
    // Index: 0: +h e1, 1: -h e1, 2: +h e2, 3: -h e2.
    C lu1[4], lu2[4], lv1[4], lv2[4];
    for (int a = 0; a < 4; ++a) {
        const R s = (a % 2 == 0) ? h : -h;
        lu1[a] = (a < 2) ? u1 + s : u1;
        lu2[a] = (a < 2) ? u2 : u2 + s;
        lv1[a] = (a < 2) ? v1 + s : v1;
        lv2[a] = (a < 2) ? v2 : v2 + s;
    }
    C grid[4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            grid[a][b] = logk(lu1[a], lu2[a], lv1[b], lv2[b]);

    std::array<C, 4> out;
    const R denom = R(4) * h * h;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const int ap = 2 * i, am = 2 * i + 1;
            const int bp = 2 * j, bm = 2 * j + 1;
            out[i * 2 + j] =
                (grid[ap][bp] - grid[ap][bm] - grid[am][bp] + grid[am][bm]) / denom;
        }
    return out;
}

// Richardson extrapolation over steps h and h/2; *err_out receives the
// largest relative discrepancy between the two stencils.
template <class R, class LogF>
std::array<std::complex<R>, 4> mixed_fd(LogF&& logk, std::complex<R> u1,
                                        std::complex<R> u2, std::complex<R> v1,
                                        std::complex<R> v2, R h, bool richardson,
                                        R* err_out = nullptr)
{
    auto dh = mixed_fd_once(logk, u1, u2, v1, v2, h);
    if (!richardson) {
        if (err_out) *err_out = R(0);
        return dh;
    }
    auto dh2 = mixed_fd_once(logk, u1, u2, v1, v2, h / R(2));
    std::array<std::complex<R>, 4> out;
    R scale(0);
    for (int k = 0; k < 4; ++k) scale = std::max(scale, std::abs(dh2[k]));
    R err(0);
    for (int k = 0; k < 4; ++k) {
        out[k] = (R(4) * dh2[k] - dh[k]) / R(3);
        err = std::max(err, std::abs(dh2[k] - dh[k]) / std::max(scale, R(1e-30)));
    }
    if (err_out) *err_out = err;
    return out;
}

// Two-level Richardson over steps h, h/2, h/4: the h^2 and h^4 terms drop
// out, leaving O(h^6) truncation.  *err_out receives the relative
// discrepancy of the two first-level extrapolants.
template <class R, class LogF>
std::array<std::complex<R>, 4> mixed_fd2(LogF&& logk, std::complex<R> u1,
                                         std::complex<R> u2, std::complex<R> v1,
                                         std::complex<R> v2, R h,
                                         R* err_out = nullptr)
{
    const auto d1 = mixed_fd_once(logk, u1, u2, v1, v2, h);
    const auto d2 = mixed_fd_once(logk, u1, u2, v1, v2, h / R(2));
    const auto d4 = mixed_fd_once(logk, u1, u2, v1, v2, h / R(4));
    std::array<std::complex<R>, 4> r1a, r1b, out;
    for (int k = 0; k < 4; ++k) {
        r1a[k] = (R(4) * d2[k] - d1[k]) / R(3);
        r1b[k] = (R(4) * d4[k] - d2[k]) / R(3);
        out[k] = (R(16) * r1b[k] - r1a[k]) / R(15);
    }
    R scale(0);
    for (int k = 0; k < 4; ++k) scale = std::max(scale, std::abs(r1b[k]));
    R err(0);
    for (int k = 0; k < 4; ++k)
        err = std::max(err, std::abs(r1b[k] - r1a[k]) / std::max(scale, R(1e-30)));
    if (err_out) *err_out = err;
    return out;
}

// Path choice for differencing stencils: prefer the series whenever its
// ratio is comfortably inside the convergence disc, so that neither path
// loses digits to bracket cancellation under the 1/h^2 amplification.
template <class R>
BergmanPath stencil_path(std::complex<R> u1, std::complex<R> u2,
                         std::complex<R> v1, std::complex<R> v2)
{
    const auto z = quadratic_roots<R>(u1, u2);
    const auto w = quadratic_roots<R>(v1, v2);
    const std::complex<R> d11 = std::complex<R>(1) - z[0] * std::conj(w[0]);
    const std::complex<R> d22 = std::complex<R>(1) - z[1] * std::conj(w[1]);
    const R num = std::abs(z[0] - z[1]) * std::abs(w[0] - w[1]);
    return num < R(0.3) * std::abs(d11 * d22) ? BergmanPath::Series
                                              : BergmanPath::Raw;
}

// Polarized curvature entries ((d_i dbar_j log B^(lambda)))(u, v).  The
// raw/series path is fixed (from the center when Auto) so that differencing
// never straddles the switchover; the log branch is pinned to the center
// value, which cancels in the second differences.  The step starts from h
// scaled by the boundary margin and is refined until the measured stencil
// discrepancy supports full accuracy; near-royal points close to the
// boundary need steps well below the interior default.
template <class R>
std::array<std::complex<R>, 4> bergman_polarized_raw(
    R lambda, std::complex<R> u1, std::complex<R> u2, std::complex<R> v1,
    std::complex<R> v2, R h, R threshold, int max_terms,
    BergmanPath path = BergmanPath::Auto, R* err_out = nullptr)
{
    using C = std::complex<R>;
    if (path == BergmanPath::Auto) path = stencil_path<R>(u1, u2, v1, v2);
    {
        const auto z = quadratic_roots<R>(u1, u2);
        const auto w = quadratic_roots<R>(v1, v2);
        const R zmax = std::max(std::max(std::abs(z[0]), std::abs(z[1])),
                                std::max(std::abs(w[0]), std::abs(w[1])));
        h *= std::min(R(1), R(5) * (1 - zmax * zmax));
    }
    const C kc = bergman_g2(lambda, u1, u2, v1, v2, threshold, max_terms, path);
    const auto logk = [&](C a1, C a2, C b1, C b2) {
        const C k = bergman_g2(lambda, a1, a2, b1, b2, threshold, max_terms, path);
        const C ratio = k / kc;
        if (std::abs(ratio - C(1)) > R(0.9))
            throw NumericError("polarized curvature: log branch jump in stencil");
        return std::log(ratio);
    };
    // Coarsest level 4h: the two-level extrapolation removes the low-order
    // truncation, so the wider stencil wins on evaluation noise.  Refine
    // only while the measured discrepancy improves (truncation regime) and
    // stop at the noise wall.
    R cur = R(4) * h;
    std::array<C, 4> out{};
    R err = std::numeric_limits<R>::infinity();
    for (int refine = 0; refine < 4; ++refine) {
        R e(0);
        const auto d = mixed_fd2(logk, u1, u2, v1, v2, cur, &e);
        if (e < err) {
            out = d;
            err = e;
        } else {
            break;
        }
        if (err <= R(3e-9) || cur <= R(2e-5)) break;
        cur /= R(2);
    }
    if (err_out) *err_out = err;
    return out;
}

} // namespace g2kern::detail
