#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "g2kern/kernels.hpp"
#include "g2kern/random.hpp"

using namespace g2kern;

namespace {

// lambda = 1 oracle: B^(1)(u, v) = 1 / (2 prod_{i,j} (1 - z_i conj(w_j))).
Complex bergman1_product_oracle(const Disc2Point& z, const Disc2Point& w)
{
    const Complex z1 = z.z1().value(), z2 = z.z2().value();
    const Complex w1 = w.z1().value(), w2 = w.z2().value();
    return 1.0 / (2.0 * (1.0 - z1 * std::conj(w1)) * (1.0 - z1 * std::conj(w2)) *
                  (1.0 - z2 * std::conj(w1)) * (1.0 - z2 * std::conj(w2)));
}

// Royal-slice closed form: B^(l)_s((z,z), w).
Complex royal_slice_oracle(double lambda, Complex z, const Disc2Point& w)
{
    const Complex a = 1.0 - z * std::conj(w.z1().value());
    const Complex b = 1.0 - z * std::conj(w.z2().value());
    return lambda / (2.0 * std::pow(a, lambda + 1.0) * std::pow(b, lambda + 1.0));
}

double royal_diag(double lambda, double zmod2)
{
    return lambda / 2.0 * std::pow(1.0 - zmod2, -2.0 * lambda - 2.0);
}

Disc2Point random_disc2(Rng& rng, double rmax = 0.85)
{
    return Disc2Point(rng.disc(rmax), rng.disc(rmax));
}

// Cubic least squares y ~ a0 + a1 x + a2 x^2 + a3 x^3, returning a0.
double lsq_intercept(const std::vector<double>& xs, const std::vector<double>& ys)
{
    double s[7] = {0, 0, 0, 0, 0, 0, 0};
    double t[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double xp = 1.0;
        for (int k = 0; k <= 6; ++k, xp *= xs[i]) s[k] += xp;
        xp = 1.0;
        for (int k = 0; k <= 3; ++k, xp *= xs[i]) t[k] += ys[i] * xp;
    }
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = s[i + j];
    const Eigen::Vector4d rhs(t[0], t[1], t[2], t[3]);
    return m.fullPivLu().solve(rhs)(0);
}

} // namespace

TEST_CASE("generalized binomial")
{
    CHECK(binomial(1.0, 3) == 0.0);  // exact zeros for integer lambda
    CHECK(binomial(2.0, 3) == 0.0);
    CHECK(binomial(1.0, 4) == 0.0);
    CHECK(binomial(3.0, 2) == 3.0);
    CHECK(binomial(0.5, 2) == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(binomial(2.5, 0) == 1.0);
}

TEST_CASE("eval_bergman_raw pinned values")
{
    const Disc2Point z{Complex(0.5), Complex(0.0)};
    CHECK(std::abs(eval_bergman_raw(1.0, z, z) - Complex(2.0 / 3.0)) < 1e-15);

    // Diagonal input: the two bracket terms coincide.
    const Disc2Point diag{Complex(0.5), Complex(0.5)};
    CHECK_THROWS_AS(eval_bergman_raw(2.0, diag, diag), CancellationError);
}

TEST_CASE("lambda = 1 product oracle")
{
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const Disc2Point z = random_disc2(rng), w = random_disc2(rng);
        const G2Point u = symmetrize(z), v = symmetrize(w);
        const Complex k = eval_kernel(KernelSpec::bergman(1.0), u, v);
        const Complex oracle = bergman1_product_oracle(z, w);
        CHECK(std::abs(k - oracle) <= 1e-12 * std::abs(oracle));
    }
}

TEST_CASE("series path: royal diagonal values")
{
    const EvalOptions opts;
    for (const double lambda : {0.5, 1.0, 2.0, 3.5}) {
        for (const double zm : {0.0, 0.3, 0.6, 0.9}) {
            const Disc2Point zz{Complex(zm), Complex(zm)};
            const Complex got = eval_bergman_series(lambda, zz, zz, opts);
            const double expected = royal_diag(lambda, zm * zm);
            CHECK(std::abs(got - expected) <= 1e-12 * expected);
        }
    }
    // lambda = 2, z = 0 gives exactly 1; z = w = (0.5, 0.5) gives 4096/729.
    const Disc2Point origin{Complex(0.0), Complex(0.0)};
    CHECK(std::abs(eval_bergman_series(2.0, origin, origin) - 1.0) < 1e-15);
    const Disc2Point half{Complex(0.5), Complex(0.5)};
    CHECK(std::abs(eval_bergman_series(2.0, half, half) - 4096.0 / 729.0) <=
          1e-12 * 4096.0 / 729.0);
}

TEST_CASE("series path: royal slice against the closed form")
{
    const Disc2Point origin{Complex(0.0), Complex(0.0)};
    CHECK(std::abs(eval_bergman_series(3.0, origin, origin) - 1.5) < 1e-15);

    Rng rng(17);
    for (const double lambda : {1.0, 2.0, 3.5}) {
        for (int i = 0; i < 40; ++i) {
            const Complex z = rng.disc(0.8);
            const Disc2Point zz(z, z);
            const Disc2Point w = random_disc2(rng);
            const Complex got = eval_bergman_series(lambda, zz, w);
            const Complex expected = royal_slice_oracle(lambda, z, w);
            CHECK(std::abs(got - expected) <= 1e-10 * std::abs(expected));
        }
    }
}

TEST_CASE("raw and series paths agree on the switchover annulus")
{
    Rng rng(29);
    const EvalOptions opts;
    int tested = 0;
    while (tested < 200) {
        const Complex z1 = rng.disc(0.6), w1 = rng.disc(0.6);
        const double dz = rng.uniform(0.05, 0.3);
        const double dw =
            rng.uniform(0.5 * opts.series_threshold, 2.0 * opts.series_threshold) / dz;
        if (dw > 0.3) continue;
        const Complex z2 = z1 + std::polar(dz, rng.uniform(0.0, 6.28));
        const Complex w2 = w1 + std::polar(dw, rng.uniform(0.0, 6.28));
        if (std::abs(z2) >= 0.95 || std::abs(w2) >= 0.95) continue;
        const Disc2Point z(z1, z2), w(w1, w2);
        for (const double lambda : {1.0, 2.5}) {
            const Complex raw = eval_bergman_raw(lambda, z, w);
            const Complex series = eval_bergman_series(lambda, z, w, opts);
            CHECK(std::abs(raw - series) <= 1e-10 * std::abs(raw));
        }
        ++tested;
    }
}

TEST_CASE("series diverges outside its validity region")
{
    // Far off-diagonal near the boundary the series ratio exceeds 1.
    const Disc2Point far{Complex(0.9), Complex(-0.9)};
    CHECK_THROWS_AS(eval_bergman_series(2.5, far, far), NonConvergenceError);
}

TEST_CASE("integer lambda series terminates exactly")
{
    Rng rng(37);
    for (const double lambda : {1.0, 2.0, 3.0}) {
        for (int i = 0; i < 30; ++i) {
            const Disc2Point z = random_disc2(rng, 0.7), w = random_disc2(rng, 0.7);
            if (std::abs(z.z1().value() - z.z2().value()) *
                    std::abs(w.z1().value() - w.z2().value()) <
                0.05)
                continue;
            const Complex raw = eval_bergman_raw(lambda, z, w);
            const Complex series = eval_bergman_series(lambda, z, w);
            CHECK(std::abs(raw - series) <= 1e-13 * std::abs(raw));
        }
    }
}

TEST_CASE("non-vanishing scan")
{
    for (const double lambda : {1.0, 2.5}) {
        double minmod = 1e300;
        for (int a = 0; a < 20; ++a)
            for (int b = 0; b < 20; ++b)
                for (int c = 0; c < 20; ++c)
                    for (int d = 0; d < 20; ++d) {
                        const Complex z1 = std::polar(0.85 * a / 19.0, 0.31 * b);
                        const Complex z2 = std::polar(0.85 * c / 19.0, 0.33 * d + 0.4);
                        const G2Point u = symmetrize(Disc2Point(z1, z2));
                        const Complex k =
                            eval_kernel(KernelSpec::bergman(lambda), u, u);
                        minmod = std::min(minmod, std::abs(k));
                    }
        CHECK(minmod > 0.0);
    }
}

TEST_CASE("Hermitian symmetry of the direct evaluators")
{
    Rng rng(43);
    for (int i = 0; i < 200; ++i) {
        const Disc2Point z = random_disc2(rng), w = random_disc2(rng);
        const G2Point u = symmetrize(z), v = symmetrize(w);
        for (const double lambda : {1.0, 2.5}) {
            if (std::abs(z.z1().value() - z.z2().value()) *
                    std::abs(w.z1().value() - w.z2().value()) >
                0.02) {
                const Complex a = eval_bergman_raw(lambda, z, w);
                const Complex b = eval_bergman_raw(lambda, w, z);
                CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
            }
            const Complex c = eval_symmetric(lambda, u, v);
            const Complex d = eval_symmetric(lambda, v, u);
            CHECK(std::abs(c - std::conj(d)) <= 1e-12 * std::abs(c));
        }
    }
}

TEST_CASE("eval_kernel is Hermitian by construction, across families")
{
    Rng rng(47);
    const std::array<KernelSpec, 5> specs = {
        KernelSpec::bergman(2.0),
        KernelSpec::power(KernelSpec::bergman(1.5), 1.5),
        KernelSpec::symmetric_c(2.0),
        KernelSpec::det_curvature(2.0, 1.0),
        KernelSpec::product({KernelSpec::bergman(1.0), KernelSpec::symmetric_c(1.0)}),
    };
    for (int i = 0; i < 10; ++i) {
        const G2Point u = random_g2_point(rng, 0.8), v = random_g2_point(rng, 0.8);
        for (const auto& spec : specs) {
            const Complex a = eval_kernel(spec, u, v);
            const Complex b = eval_kernel(spec, v, u);
            CHECK(a == std::conj(b));
        }
        const KernelSpec mc = KernelSpec::matrix_curvature(2.0);
        const Eigen::Matrix2cd ma = eval_kernel_matrix(mc, u, v);
        const Eigen::Matrix2cd mb = eval_kernel_matrix(mc, v, u);
        CHECK((ma - mb.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("eval_kernel pinned values")
{
    const G2Point o = G2Point::origin();
    const G2Point p(0.5, 0.0);
    CHECK(std::abs(eval_kernel(KernelSpec::bergman(1.0), o, p) - 0.5) < 1e-14);
    for (const double lambda : {1.0, 2.0, 3.5})
        CHECK(std::abs(eval_kernel(KernelSpec::bergman(lambda), o, o) - lambda / 2.0) <
              1e-14);

    // Product of two B^(1) equals the Schur square.
    Rng rng(53);
    const KernelSpec prod =
        KernelSpec::product({KernelSpec::bergman(1.0), KernelSpec::bergman(1.0)});
    const KernelSpec sq = KernelSpec::power(KernelSpec::bergman(1.0), 2.0);
    for (int i = 0; i < 30; ++i) {
        const G2Point u = random_g2_point(rng), v = random_g2_point(rng);
        const Complex a = eval_kernel(prod, u, v);
        const Complex b = eval_kernel(sq, u, v);
        CHECK(std::abs(a - b) <= 1e-14 * std::abs(a));
    }
}

TEST_CASE("eval_symmetric pinned values")
{
    CHECK(std::abs(eval_symmetric(2.0, G2Point::origin(), G2Point::origin()) - 1.0) <
          1e-15);
    const G2Point p(0.5, 0.0);
    CHECK(std::abs(eval_symmetric(1.0, p, p) - 7.0 / 6.0) < 1e-14);
    // Royal diagonal: C^(l)(s(z,z), s(z,z)) = (1-|z|^2)^(-2l).
    const G2Point royal(1.0, 0.25);
    CHECK(std::abs(eval_symmetric(1.0, royal, royal) - 16.0 / 9.0) < 1e-13);
}

TEST_CASE("eval_power branches")
{
    Rng rng(59);
    const KernelSpec b2 = KernelSpec::bergman(2.0);
    for (int i = 0; i < 30; ++i) {
        const G2Point u = random_g2_point(rng), v = random_g2_point(rng);
        const Complex k = eval_kernel(b2, u, v);
        CHECK(eval_power(b2, 1.0, u, v) == k);
        const Complex square = eval_power(b2, 2.0, u, v);
        CHECK(std::abs(square - k * k) <= 1e-13 * std::abs(k * k));
        // Path-continued fractional powers square back to integer ones.
        const Complex half3 = eval_power(b2, 1.5, u, v);
        CHECK(std::abs(half3 * half3 - k * k * k) <= 1e-11 * std::abs(k * k * k));
    }
    CHECK(std::abs(eval_power(b2, 0.5, G2Point::origin(), G2Point::origin()) - 1.0) <
          1e-13);

    CHECK_THROWS_AS(eval_power(KernelSpec::symmetric_c(1.0), 0.5, G2Point::origin(),
                               G2Point::origin()),
                    UnsupportedPowerError);
    CHECK_NOTHROW(eval_power(KernelSpec::symmetric_c(1.0), 2.0, G2Point::origin(),
                             G2Point(0.3, 0.0)));
}

TEST_CASE("eval_H: lambda = 1 closed form on both paths")
{
    const auto closed = [](Complex z1, Complex z2) {
        return 0.5 / ((1.0 - std::norm(z1)) * (1.0 - std::norm(z2)) *
                      std::norm(1.0 - std::conj(z1) * z2));
    };
    CHECK(eval_H(1.0, Disc2Point(Complex(0.0), Complex(0.0))) ==
          doctest::Approx(0.5).epsilon(1e-14));

    Rng rng(61);
    for (int i = 0; i < 60; ++i) {
        // Quotient path: comfortably separated coordinates.
        const Complex z1 = rng.disc(0.5);
        const Complex z2 =
            z1 + std::polar(rng.uniform(0.3, 0.45), rng.uniform(0.0, 6.28));
        if (std::abs(z2) >= 0.9) continue;
        const double got = eval_H(1.0, Disc2Point(z1, z2));
        CHECK(got == doctest::Approx(closed(z1, z2)).epsilon(1e-12));
    }
    for (int i = 0; i < 60; ++i) {
        // Series path: inside the diagonal tube.
        const Complex z1 = rng.disc(0.7);
        const Complex z2 =
            z1 + std::polar(rng.uniform(0.0, 0.005), rng.uniform(0.0, 6.28));
        const double got = eval_H(1.0, Disc2Point(z1, z2));
        CHECK(got == doctest::Approx(closed(z1, z2)).epsilon(1e-12));
    }
}

TEST_CASE("eval_H leading coefficient and the (z,-z) limit")
{
    for (const double lambda : {1.0, 2.0, 3.0}) {
        const double lead = lambda * (lambda + 1.0) * (2.0 * lambda + 1.0) / 12.0;
        const double got = eval_H(lambda, Disc2Point(Complex(0.0), Complex(0.0)));
        CHECK(got == doctest::Approx(lead).epsilon(1e-14));
    }
    const double t = 1e-3;
    CHECK(eval_H(1.0, Disc2Point(Complex(t), Complex(-t))) ==
          doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("h_coefficients: zeros at lambda = 1, fit oracle at lambda = 2")
{
    for (int p = 3; p <= 8; ++p) CHECK(h_coefficients(1.0, p).coefficient == 0.0);

    // Oracle for h_3 at lambda = 2: quadratic fit of
    // Psi(x) = [H(t,-t) - lead(t)] (1+x)^(2l) (1-x)^(6-2l) / (4x), x = t^2,
    // whose intercept is the h_3 bracket.
    const double lambda = 2.0;
    std::vector<double> xs, ys;
    for (const double x : {0.004, 0.008, 0.012, 0.016, 0.02, 0.024}) {
        const double t = std::sqrt(x);
        const double H = eval_H(lambda, Disc2Point(Complex(t), Complex(-t)));
        const double lead = lambda * (lambda + 1.0) * (2.0 * lambda + 1.0) / 12.0 *
                            std::pow(1.0 - x, 2.0 * lambda - 4.0) *
                            std::pow(1.0 + x, -2.0 * lambda);
        const double psi = (H - lead) * std::pow(1.0 + x, 2.0 * lambda) *
                           std::pow(1.0 - x, 6.0 - 2.0 * lambda) / (4.0 * x);
        xs.push_back(x);
        ys.push_back(psi);
    }
    const double fitted = lsq_intercept(xs, ys);
    const double closed = h_coefficients(lambda, 3).coefficient;
    CHECK(closed == doctest::Approx(2.5).epsilon(1e-14));  // direct arithmetic
    CHECK(fitted == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("H leading coefficient matches the (z,-z) series p = 1 term")
{
    const auto poch = [](double a, int k) {
        double p = 1.0;
        for (int j = 0; j < k; ++j) p *= a + j;
        return p;
    };
    for (const double lambda : {1.0, 2.0, 3.0}) {
        const double term = (poch(2.0 * lambda, 1) * binomial(2.0 * lambda + 2.0, 2) +
                             poch(2.0 * lambda, 3) / 6.0) /
                            32.0;
        const double lead = lambda * (lambda + 1.0) * (2.0 * lambda + 1.0) / 12.0;
        CHECK(std::abs(term - lead) <= 1e-12 * lead);
    }
}

TEST_CASE("inequivalence proof helpers approach the stated limits")
{
    for (const double lambda : {1.0, 2.0, 3.5}) {
        const auto rec = inequiv_proof_helpers(lambda, 0.999999);
        const auto& h = rec.helper_values;
        CHECK(h.at("G1") == doctest::Approx(lambda + 1.0).epsilon(1e-4));
        CHECK(h.at("G2") == doctest::Approx(lambda + 1.0).epsilon(1e-4));
        CHECK(h.at("G3") == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(h.at("G4") == doctest::Approx(lambda + 1.0).epsilon(1e-4));
        CHECK(h.at("Ltilde") == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(h.at("b22") == doctest::Approx(lambda).epsilon(1e-3));
    }
}

TEST_CASE("kernel spec strings round trip")
{
    const std::array<std::string, 6> texts = {
        "bergman:l=2",
        "power:bergman:l=2,nu=1.5",
        "symC:l=1",
        "detcurv:l=2,nu=1",
        "matcurv:l=2",
        "product:[bergman:l=1;power:bergman:l=3,nu=2]",
    };
    for (const auto& t : texts) {
        const KernelSpec spec = KernelSpec::parse(t);
        CHECK(KernelSpec::parse(spec.str()).str() == spec.str());
        CHECK(spec.str() == t);
    }
    CHECK_THROWS_AS(KernelSpec::parse("gauss:l=2"), DomainError);
    CHECK_THROWS_AS(KernelSpec::parse("bergman:l=-1"), DomainError);
    CHECK_THROWS_AS(KernelSpec::parse("bergman:nu=1"), DomainError);
    CHECK(KernelSpec::parse("matcurv:l=2").matrix_valued());
}

TEST_CASE("eval options are validated")
{
    EvalOptions bad;
    bad.series_threshold = 0.7;
    CHECK_THROWS_AS(eval_kernel(KernelSpec::bergman(1.0), G2Point::origin(),
                                G2Point::origin(), bad),
                    DomainError);
    bad = EvalOptions{};
    bad.series_terms = 2;
    CHECK_THROWS_AS(eval_kernel(KernelSpec::bergman(1.0), G2Point::origin(),
                                G2Point::origin(), bad),
                    DomainError);
}
