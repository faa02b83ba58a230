#include "g2kern/geometry.hpp"

#include <sstream>

namespace g2kern {

namespace {

std::string point_str(Complex z)
{
    std::ostringstream os;
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

} // namespace

DiscPoint::DiscPoint(Complex value) : value_(value)
{
    if (!(std::abs(value) < 1.0))
        throw DomainError("DiscPoint: |z| >= 1 at z = " + point_str(value));
}

G2Point::G2Point(Complex u1, Complex u2) : u1_(u1), u2_(u2)
{
    if (!is_in_g2(u1, u2))
        throw NotInG2Error("G2Point: not in the symmetrized bidisc, u = (" +
                           point_str(u1) + ", " + point_str(u2) + ")");
}

G2Point symmetrize(const Disc2Point& z)
{
    const Complex a = z.z1().value();
    const Complex b = z.z2().value();
    return G2Point(a + b, a * b);
}

std::array<DiscPoint, 2> solve_preimage(const G2Point& u)
{
    const auto roots = detail::quadratic_roots<double>(u.u1(), u.u2());
    return {DiscPoint(roots[0]), DiscPoint(roots[1])};
}

bool is_in_g2(Complex u1, Complex u2, double margin)
{
    const auto roots = detail::quadratic_roots<double>(u1, u2);
    return std::abs(roots[0]) < 1.0 - margin && std::abs(roots[1]) < 1.0 - margin;
}

} // namespace g2kern
