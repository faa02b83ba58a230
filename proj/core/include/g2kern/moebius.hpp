#pragma once

#include "g2kern/geometry.hpp"

namespace g2kern {

// Disc automorphism phi_{t,alpha}(z) = t (alpha - z) / (1 - conj(alpha) z),
// |t| = 1, alpha in D.  The involution interchanging 0 and alpha is t = 1;
// the rotation z -> e^{i theta} z is (t, alpha) = (-e^{i theta}, 0).
class MoebiusMap {
public:
    MoebiusMap(Complex t, DiscPoint alpha);

    static MoebiusMap identity() { return MoebiusMap(-1.0, DiscPoint(0.0)); }
    static MoebiusMap involution(DiscPoint alpha) { return MoebiusMap(1.0, alpha); }
    static MoebiusMap rotation(double theta);

    Complex t() const { return t_; }
    Complex alpha() const { return alpha_; }
    bool is_identity(double tol = 1e-14) const;

    // Unchecked evaluation; mobius_apply is the domain-checked entry point.
    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;
    Complex second_derivative(Complex z) const;

    MoebiusMap inverse() const;

private:
    Complex t_;     // stored normalized to |t| = 1
    Complex alpha_;
};

// Composition: (a * b)(z) = a(b(z)).
MoebiusMap operator*(const MoebiusMap& a, const MoebiusMap& b);

DiscPoint mobius_apply(const MoebiusMap& phi, DiscPoint z);
Complex mobius_derivative(const MoebiusMap& phi, DiscPoint z);

} // namespace g2kern
