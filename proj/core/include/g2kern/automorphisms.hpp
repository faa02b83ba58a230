#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "g2kern/moebius.hpp"

namespace g2kern {

// Automorphism of G_2 induced by a disc automorphism phi:
// g(s(z1, z2)) = s(phi(z1), phi(z2)).
class AutomorphismMap {
public:
    explicit AutomorphismMap(MoebiusMap base) : base_(base) {}

    static AutomorphismMap identity() { return AutomorphismMap(MoebiusMap::identity()); }

    const MoebiusMap& base() const { return base_; }
    bool is_identity(double tol = 1e-14) const { return base_.is_identity(tol); }

    AutomorphismMap inverse() const { return AutomorphismMap(base_.inverse()); }

private:
    MoebiusMap base_;
};

inline AutomorphismMap operator*(const AutomorphismMap& a, const AutomorphismMap& b)
{
    return AutomorphismMap(a.base() * b.base());
}

struct JacobianMatrix {
    Eigen::Matrix2cd matrix;
    Complex det;  // chain-rule product form, never a fractional power
};

struct CocycleValue {
    Complex value;         // phihat = phi'(z1) phi'(z2)
    Complex det_jacobian;  // det D(phi~); satisfies det^2 = value^3
};

enum class RootOrder { Canonical, Swapped };

struct FundamentalDecomposition {
    double r = 0.0;
    double theta = 0.0;  // in [0, 2*pi)
    AutomorphismMap g = AutomorphismMap::identity();
    std::array<DiscPoint, 2> preimage = {DiscPoint(0.0), DiscPoint(0.0)};
};

// stab((r,0)): {id, phi~_r} for r > 0, the rotation family for r = 0.
struct StabilizerDescription {
    double r = 0.0;
    bool rotation_family = false;
    std::vector<AutomorphismMap> elements;  // the discrete part, identity first

    // Sampling accessor for the rotation family at r = 0.
    AutomorphismMap rotation(double theta) const;
};

G2Point aut_apply(const AutomorphismMap& g, const G2Point& u);

// D(phi~) at u.  The determinant uses the chain-rule form
// [(phi(z2)-phi(z1))/(z2-z1)] phi'(z1) phi'(z2), with the confluent limit
// phi'(z)^3 when |z1 - z2| < 1e-9.
JacobianMatrix aut_jacobian(const AutomorphismMap& g, const G2Point& u);

CocycleValue cocycle_J(const AutomorphismMap& g, const G2Point& u);

StabilizerDescription stabilizer(double r);

// Decompose u = g(s(r, 0)) with r = |phi_{z1}(z2)|, theta = arg phi_{z1}(z2)
// and g = phi~_{z1} o phi~_theta.
FundamentalDecomposition to_fundamental(const G2Point& u,
                                        RootOrder order = RootOrder::Canonical);

} // namespace g2kern
