#pragma once

#include <array>
#include <complex>

#include "g2kern/errors.hpp"

namespace g2kern {

using Complex = std::complex<double>;

// Point of the open unit disc D.
class DiscPoint {
public:
    explicit DiscPoint(Complex value);

    Complex value() const { return value_; }

private:
    Complex value_;
};

// Point of the bidisc D x D.
class Disc2Point {
public:
    Disc2Point(DiscPoint z1, DiscPoint z2) : z1_(z1), z2_(z2) {}
    Disc2Point(Complex z1, Complex z2) : z1_(z1), z2_(z2) {}

    DiscPoint z1() const { return z1_; }
    DiscPoint z2() const { return z2_; }

private:
    DiscPoint z1_, z2_;
};

// Point of the symmetrized bidisc G_2 = { (z1+z2, z1*z2) : z1, z2 in D }.
// Membership is checked at construction: both roots of t^2 - u1*t + u2
// must lie strictly inside the unit disc.
class G2Point {
public:
    G2Point(Complex u1, Complex u2);

    Complex u1() const { return u1_; }
    Complex u2() const { return u2_; }

    static G2Point origin() { return G2Point(0.0, 0.0); }

private:
    Complex u1_, u2_;
};

// s(z1, z2) = (z1 + z2, z1 z2).
G2Point symmetrize(const Disc2Point& z);

// The two roots of t^2 - u1*t + u2, in canonical order (lexicographically
// decreasing on (re, im), so that points with real distinct roots decompose
// with theta = 0).  Throws NotInG2Error when a root leaves the open disc.
std::array<DiscPoint, 2> solve_preimage(const G2Point& u);

// Membership test with a configurable boundary margin: both roots must
// satisfy |root| < 1 - margin.
bool is_in_g2(Complex u1, Complex u2, double margin = 0.0);

namespace detail {

// Unvalidated root solver for t^2 - u1*t + u2, canonical order.
template <class R>
std::array<std::complex<R>, 2> quadratic_roots(std::complex<R> u1, std::complex<R> u2)
{
    using C = std::complex<R>;
    const C b = -u1;
    const C sq = std::sqrt(b * b - R(4) * u2);
    // Pick the sign that avoids cancellation in b + s.
    const C s = (std::real(std::conj(b) * sq) >= R(0)) ? sq : -sq;
    const C q = -(b + s) / R(2);
    C r1, r2;
    if (std::abs(q) == R(0)) {
        r1 = C(0);
        r2 = C(0);
    } else {
        r1 = q;
        r2 = u2 / q;
    }
    const bool first_is_larger =
        (std::real(r1) > std::real(r2)) ||
        (std::real(r1) == std::real(r2) && std::imag(r1) >= std::imag(r2));
    if (!first_is_larger) std::swap(r1, r2);
    return {r1, r2};
}

} // namespace detail

} // namespace g2kern
