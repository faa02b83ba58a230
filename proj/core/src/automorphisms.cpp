#include "g2kern/automorphisms.hpp"

#include <cmath>
#include <numbers>

namespace g2kern {

namespace {

constexpr double kConfluentEps = 1e-9;

struct JacobianParts {
    Eigen::Matrix2cd m;
    Complex q;  // (phi(z1)-phi(z2))/(z1-z2), the symmetric square root of phihat
};

JacobianParts jacobian_parts(const MoebiusMap& phi, Complex z1, Complex z2)
{
    JacobianParts out;
    if (std::abs(z1 - z2) < kConfluentEps) {
        // Confluent limit, evaluated at the midpoint.
        const Complex z = 0.5 * (z1 + z2);
        const Complex f = phi(z);
        const Complex p = phi.derivative(z);
        const Complex pp = phi.second_derivative(z);
        out.m << pp * z + p, -pp,
                 f * pp * z + f * p - p * p * z, p * p - f * pp;
        out.q = p;
        return out;
    }
    const Complex f1 = phi(z1), f2 = phi(z2);
    const Complex p1 = phi.derivative(z1), p2 = phi.derivative(z2);
    const Complex dz = z1 - z2;
    out.m << (p1 * z1 - p2 * z2) / dz, (p2 - p1) / dz,
             (f2 * p1 * z1 - f1 * p2 * z2) / dz, (f1 * p2 - f2 * p1) / dz;
    out.q = (f1 - f2) / dz;
    return out;
}

} // namespace

AutomorphismMap StabilizerDescription::rotation(double theta) const
{
    if (!rotation_family)
        throw DomainError("stabilizer: rotation family exists only at r = 0");
    return AutomorphismMap(MoebiusMap::rotation(theta));
}

G2Point aut_apply(const AutomorphismMap& g, const G2Point& u)
{
    if (g.base().is_identity(0.0)) return u;
    const auto z = detail::quadratic_roots<double>(u.u1(), u.u2());
    const Complex a = g.base()(z[0]);
    const Complex b = g.base()(z[1]);
    return G2Point(a + b, a * b);
}

JacobianMatrix aut_jacobian(const AutomorphismMap& g, const G2Point& u)
{
    const auto z = detail::quadratic_roots<double>(u.u1(), u.u2());
    const auto parts = jacobian_parts(g.base(), z[0], z[1]);
    const Complex phihat = g.base().derivative(z[0]) * g.base().derivative(z[1]);
    return {parts.m, parts.q * phihat};
}

CocycleValue cocycle_J(const AutomorphismMap& g, const G2Point& u)
{
    const auto z = detail::quadratic_roots<double>(u.u1(), u.u2());
    const Complex phihat = g.base().derivative(z[0]) * g.base().derivative(z[1]);
    const auto parts = jacobian_parts(g.base(), z[0], z[1]);
    return {phihat, parts.q * phihat};
}

StabilizerDescription stabilizer(double r)
{
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError("stabilizer: r must lie in [0, 1)");
    StabilizerDescription out;
    out.r = r;
    out.elements.push_back(AutomorphismMap::identity());
    if (r == 0.0) {
        out.rotation_family = true;
    } else {
        out.elements.push_back(AutomorphismMap(MoebiusMap::involution(DiscPoint(r))));
    }
    return out;
}

FundamentalDecomposition to_fundamental(const G2Point& u, RootOrder order)
{
    FundamentalDecomposition out;

    // Points already on Lambda decompose trivially.
    if (std::abs(u.u2()) <= 1e-15 && std::abs(u.u1().imag()) <= 1e-15 &&
        u.u1().real() >= 0.0) {
        out.r = u.u1().real();
        out.theta = 0.0;
        out.g = AutomorphismMap::identity();
        out.preimage = {DiscPoint(u.u1().real()), DiscPoint(0.0)};
        return out;
    }

    auto roots = detail::quadratic_roots<double>(u.u1(), u.u2());
    if (order == RootOrder::Swapped) std::swap(roots[0], roots[1]);
    const Complex z1 = roots[0], z2 = roots[1];

    const Complex w = (z1 - z2) / (1.0 - std::conj(z1) * z2);  // phi_{z1}(z2)
    out.r = std::abs(w);
    out.theta = out.r < 1e-15 ? 0.0 : std::arg(w);
    if (out.theta < 0.0) out.theta += 2.0 * std::numbers::pi;

    const MoebiusMap phi =
        MoebiusMap::involution(DiscPoint(z1)) * MoebiusMap::rotation(out.theta);
    out.g = AutomorphismMap(phi);
    out.preimage = {DiscPoint(z1), DiscPoint(z2)};
    return out;
}

} // namespace g2kern
