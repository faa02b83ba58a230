#include "g2kern/moebius.hpp"

#include <cmath>

namespace g2kern {

MoebiusMap::MoebiusMap(Complex t, DiscPoint alpha) : t_(t), alpha_(alpha.value())
{
    const double tmod = std::abs(t);
    if (std::abs(tmod - 1.0) > 1e-12)
        throw DomainError("MoebiusMap: |t| must be 1");
    t_ /= tmod;
}

MoebiusMap MoebiusMap::rotation(double theta)
{
    return MoebiusMap(-std::polar(1.0, theta), DiscPoint(0.0));
}

bool MoebiusMap::is_identity(double tol) const
{
    return std::abs(t_ + 1.0) <= tol && std::abs(alpha_) <= tol;
}

Complex MoebiusMap::operator()(Complex z) const
{
    return t_ * (alpha_ - z) / (1.0 - std::conj(alpha_) * z);
}

Complex MoebiusMap::derivative(Complex z) const
{
    const Complex d = 1.0 - std::conj(alpha_) * z;
    return t_ * (std::norm(alpha_) - 1.0) / (d * d);
}

Complex MoebiusMap::second_derivative(Complex z) const
{
    const Complex d = 1.0 - std::conj(alpha_) * z;
    return t_ * (std::norm(alpha_) - 1.0) * 2.0 * std::conj(alpha_) / (d * d * d);
}

MoebiusMap MoebiusMap::inverse() const
{
    // phi_{t,alpha}^{-1} = phi_{conj(t), t*alpha}.
    return MoebiusMap(std::conj(t_), DiscPoint(t_ * alpha_));
}

MoebiusMap operator*(const MoebiusMap& a, const MoebiusMap& b)
{
    // alpha of the composition is (a o b)^{-1}(0) = b^{-1}(a^{-1}(0)) = b^{-1}(alpha_a),
    // and psi'(0) = -t (1 - |alpha|^2) fixes t.
    const Complex alpha = b.inverse()(a.alpha());
    const Complex dpsi0 = a.derivative(b(Complex(0.0))) * b.derivative(Complex(0.0));
    const Complex t = -dpsi0 / (1.0 - std::norm(alpha));
    return MoebiusMap(t, DiscPoint(alpha));
}

DiscPoint mobius_apply(const MoebiusMap& phi, DiscPoint z)
{
    return DiscPoint(phi(z.value()));
}

Complex mobius_derivative(const MoebiusMap& phi, DiscPoint z)
{
    return phi.derivative(z.value());
}

} // namespace g2kern
