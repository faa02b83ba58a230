#include "g2kern/psd.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace g2kern {

namespace {

constexpr std::size_t kMaxSample = 64;

void append_unique(std::vector<G2Point>& pts, const G2Point& p)
{
    for (const auto& q : pts) {
        const double d = std::abs(p.u1() - q.u1()) + std::abs(p.u2() - q.u2());
        if (d <= 1e-8) return;
    }
    pts.push_back(p);
}

} // namespace

SampleSet SampleSet::grid(int n, double rmax)
{
    if (n < 1) throw DomainError("SampleSet::grid: n must be >= 1");
    SampleSet out;
    out.scheme = SampleScheme::Grid;

    // Per-disc polar grid, sized so that unordered pairs cover n points.
    std::vector<Complex> disc;
    disc.emplace_back(0.0, 0.0);
    int rings = 1;
    while (true) {
        const std::size_t m = disc.size();
        if (m * (m + 1) / 2 >= static_cast<std::size_t>(n) || rings > 8) break;
        const double r = rmax * rings / (rings + 1.0);
        const int spokes = 2 * rings + 1;
        for (int k = 0; k < spokes; ++k)
            disc.push_back(std::polar(r, 2.0 * std::numbers::pi * k / spokes));
        ++rings;
    }
    for (std::size_t a = 0; a < disc.size(); ++a)
        for (std::size_t b = a; b < disc.size(); ++b) {
            if (out.points.size() >= static_cast<std::size_t>(n)) break;
            append_unique(out.points,
                          G2Point(disc[a] + disc[b], disc[a] * disc[b]));
        }
    out.validate();
    return out;
}

SampleSet SampleSet::random(int n, std::uint64_t seed, double rmax)
{
    if (n < 1) throw DomainError("SampleSet::random: n must be >= 1");
    SampleSet out;
    out.scheme = SampleScheme::Random;
    out.seed = seed;
    Rng rng(seed);
    int guard = 0;
    while (out.points.size() < static_cast<std::size_t>(n) && guard++ < 100 * n)
        append_unique(out.points, random_g2_point(rng, rmax));
    out.validate();
    return out;
}

SampleSet SampleSet::from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("SampleSet: cannot open '" + path + "'");
    SampleSet out;
    out.scheme = SampleScheme::File;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double vals[4];
        char comma;
        for (int i = 0; i < 4; ++i) {
            if (!(ls >> vals[i])) throw DomainError("SampleSet: bad CSV row '" + line + "'");
            if (i < 3 && !(ls >> comma)) throw DomainError("SampleSet: bad CSV row '" + line + "'");
        }
        out.points.emplace_back(Complex(vals[0], vals[1]), Complex(vals[2], vals[3]));
    }
    out.validate();
    return out;
}

void SampleSet::to_csv(const std::string& path) const
{
    std::ofstream os(path);
    if (!os) throw DomainError("SampleSet: cannot write '" + path + "'");
    os.precision(17);
    for (const auto& p : points)
        os << p.u1().real() << "," << p.u1().imag() << "," << p.u2().real() << ","
           << p.u2().imag() << "\n";
}

void SampleSet::validate() const
{
    if (points.empty()) throw DomainError("SampleSet: empty");
    if (points.size() > kMaxSample)
        throw DomainError("SampleSet: more than 64 points (desk-scale cap)");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = std::abs(points[i].u1() - points[j].u1()) +
                             std::abs(points[i].u2() - points[j].u2());
            if (d <= 1e-8)
                throw DomainError("SampleSet: points closer than 1e-8");
        }
}

Eigen::MatrixXcd gram(const KernelSpec& spec, const SampleSet& sample,
                      const EvalOptions& opts)
{
    sample.validate();
    const int n = static_cast<int>(sample.points.size());
    if (!spec.matrix_valued()) {
        Eigen::MatrixXcd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                g(i, j) = eval_kernel(spec, sample.points[i], sample.points[j], opts);
                if (j != i) g(j, i) = std::conj(g(i, j));
            }
        return g;
    }
    Eigen::MatrixXcd g(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Eigen::Matrix2cd block =
                eval_kernel_matrix(spec, sample.points[i], sample.points[j], opts);
            g.block<2, 2>(2 * i, 2 * j) = block;
            if (j != i) g.block<2, 2>(2 * j, 2 * i) = block.adjoint();
        }
    return g;
}

PSDReport psd_check(const Eigen::MatrixXcd& g, double tol)
{
    const double asym = (g - g.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-30);
    if (asym > 1e-10 * scale)
        throw DomainError("psd_check: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (g + g.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("psd_check: eigensolver failed");

    PSDReport out;
    out.n = static_cast<int>(g.rows());
    out.min_eig = es.eigenvalues().minCoeff();
    out.max_eig = es.eigenvalues().maxCoeff();
    out.tol = tol;
    out.psd = out.min_eig >= -tol * std::max(std::abs(out.max_eig), 1e-30);
    return out;
}

std::vector<std::pair<double, PSDReport>> wallach_probe(
    double lambda, const std::vector<double>& nu_grid, const SampleSet& sample,
    const EvalOptions& opts)
{
    std::vector<std::pair<double, PSDReport>> out;
    out.reserve(nu_grid.size());
    for (const double nu : nu_grid) {
        if (!(nu > 0.0)) throw DomainError("wallach_probe: nu must be positive");
        const KernelSpec spec = KernelSpec::power(KernelSpec::bergman(lambda), nu);
        out.emplace_back(nu, psd_check(gram(spec, sample, opts)));
    }
    return out;
}

} // namespace g2kern
