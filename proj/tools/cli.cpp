#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "g2kern/invariants.hpp"
#include "g2kern/psd.hpp"

namespace g2kern::cli {

namespace {

using nlohmann::ordered_json;

std::vector<double> parse_csv_doubles(const std::string& s)
{
    std::vector<double> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size())
            throw DomainError("bad number '" + item + "'");
    }
    return out;
}

// A point is "re(u1),im(u1),re(u2),im(u2)"; the two-value short form
// "u1,u2" is accepted for real coordinates.
G2Point parse_point(const std::string& s)
{
    const auto v = parse_csv_doubles(s);
    if (v.size() == 2) return G2Point(v[0], v[1]);
    if (v.size() == 4) return G2Point(Complex(v[0], v[1]), Complex(v[2], v[3]));
    throw DomainError("point '" + s + "': expected 2 or 4 comma-separated values");
}

ordered_json point_json(const G2Point& u)
{
    return ordered_json{{"u1_re", u.u1().real()},
                        {"u1_im", u.u1().imag()},
                        {"u2_re", u.u2().real()},
                        {"u2_im", u.u2().imag()}};
}

ordered_json matrix_json(const Eigen::Matrix2cd& m)
{
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < 2; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < 2; ++j)
            row.push_back(ordered_json{{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
        rows.push_back(row);
    }
    return rows;
}

struct SampleFlags {
    int grid = 0;
    int random = 0;
    std::uint64_t seed = 7;
    std::string file;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--grid", grid, "polar grid sample of about N points");
        cmd->add_option("--random", random, "random sample of N points");
        cmd->add_option("--seed", seed, "seed for random sampling (default 7)");
        cmd->add_option("--points", file, "CSV file, one point per line");
    }

    SampleSet make() const
    {
        const int sources = (grid > 0) + (random > 0) + (!file.empty());
        if (sources != 1)
            throw CLI::ValidationError(
                "sample", "exactly one of --grid, --random, --points is required");
        if (grid > 0) return SampleSet::grid(grid);
        if (random > 0) return SampleSet::random(random, seed);
        return SampleSet::from_csv(file);
    }
};

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& tags = {})
{
    std::ofstream os(path);
    if (!os) throw DomainError("cannot write '" + path + "'");
    os << header << "\n";
    char buf[64];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!tags.empty()) os << tags[i] << ",";
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", rows[i][j]);
            os << buf << (j + 1 < rows[i].size() ? "," : "");
        }
        os << "\n";
    }
}

struct Options {
    // eval / curvature / psd / homogeneity
    std::string kernel;
    std::string u_text, v_text;
    std::vector<std::string> u_list;  // ke accepts several points
    double tol = 1e-9;
    double fd_step = 1e-4;
    double series_eps = 1e-2;
    std::string csv;
    std::string method = "oracle";
    double exponent = 0.0;
    bool exponent_set = false;
    double jacobian_power = 0.0;
    bool jacobian_power_set = false;
    int trials = 20;
    // invariants / classify / ke / audit / wallach
    std::string module_a, module_b;
    double lambda = 1.0;
    double nu = 0.0;
    std::string nus = "1,2,3";
    std::string r_grid = "0,0.2,0.4,0.6,0.8";
    SampleFlags sample;
};

EvalOptions eval_options(const Options& o)
{
    EvalOptions opts;
    opts.series_threshold = o.series_eps;
    opts.fd_step = o.fd_step;
    opts.validate();
    return opts;
}

int cmd_eval(const Options& o, std::ostream& out)
{
    const KernelSpec spec = KernelSpec::parse(o.kernel);
    const G2Point u = parse_point(o.u_text);
    const G2Point v = o.v_text.empty() ? u : parse_point(o.v_text);
    ordered_json doc{{"kernel", spec.str()}, {"u", point_json(u)}, {"v", point_json(v)}};
    if (spec.matrix_valued()) {
        doc["matrix"] = matrix_json(eval_kernel_matrix(spec, u, v, eval_options(o)));
    } else {
        const Complex k = eval_kernel(spec, u, v, eval_options(o));
        doc["value_re"] = k.real();
        doc["value_im"] = k.imag();
    }
    out << doc.dump(2) << "\n";
    return 0;
}

int cmd_curvature(const Options& o, std::ostream& out)
{
    const KernelSpec spec = KernelSpec::parse(o.kernel);
    const G2Point u = parse_point(o.u_text);
    FDOptions fd;
    fd.step = o.fd_step;
    const auto k = curvature_numeric(spec, u, fd, eval_options(o));
    ordered_json doc{{"kernel", spec.str()},
                     {"u", point_json(u)},
                     {"entries", matrix_json(k.entries)},
                     {"error_estimate", k.error_estimate},
                     {"hermitian", k.hermitian()},
                     {"psd", k.positive_semidefinite()},
                     {"min_eigenvalue", k.min_eigenvalue()}};
    // For the plain Bergman family the fundamental-set determinant is also
    // reported, by the method selected with --method.
    if (const auto* wb = std::get_if<WeightedBergman>(&spec.family())) {
        const DetMethod method =
            o.method == "paper" ? DetMethod::Paper : DetMethod::Oracle;
        doc["det_method"] = o.method;
        doc["det_curvature"] = det_curvature(wb->lambda, u, method);
    }
    out << doc.dump(2) << "\n";
    return 0;
}

int cmd_psd(const Options& o, std::ostream& out)
{
    const KernelSpec spec = KernelSpec::parse(o.kernel);
    const SampleSet sample = o.sample.make();
    const auto rep = psd_check(gram(spec, sample, eval_options(o)), o.tol);
    ordered_json doc{{"kernel", spec.str()},
                     {"sample_size", static_cast<int>(sample.points.size())},
                     {"gram_size", rep.n},
                     {"min_eig", rep.min_eig},
                     {"max_eig", rep.max_eig},
                     {"tol", rep.tol},
                     {"verdict", rep.verdict()}};
    out << doc.dump(2) << "\n";
    if (!o.csv.empty()) sample.to_csv(o.csv);
    return rep.psd ? 0 : 1;
}

int cmd_wallach(const Options& o, std::ostream& out)
{
    const SampleSet sample = o.sample.make();
    const auto probe =
        wallach_probe(o.lambda, parse_csv_doubles(o.nus), sample, eval_options(o));
    ordered_json rows = ordered_json::array();
    std::vector<std::vector<double>> csv_rows;
    for (const auto& [nu, rep] : probe) {
        rows.push_back(ordered_json{{"nu", nu},
                                    {"min_eig", rep.min_eig},
                                    {"max_eig", rep.max_eig},
                                    {"verdict", rep.verdict()}});
        csv_rows.push_back({nu, rep.min_eig, rep.max_eig, rep.psd ? 1.0 : 0.0});
    }
    ordered_json doc{{"lambda", o.lambda},
                     {"sample_size", static_cast<int>(sample.points.size())},
                     {"note", "a psd verdict on finitely many points is evidence, "
                              "not membership; not_psd certifies exclusion"},
                     {"rows", rows}};
    out << doc.dump(2) << "\n";
    if (!o.csv.empty()) write_csv(o.csv, "nu,min_eig,max_eig,psd", csv_rows);
    return 0;
}

int cmd_homogeneity(const Options& o, std::ostream& out)
{
    const KernelSpec spec = KernelSpec::parse(o.kernel);
    MultiplierSpec mult = MultiplierSpec::for_spec(spec);
    if (o.exponent_set) mult.kappa = o.exponent;
    if (o.jacobian_power_set) mult.jacobian_power = o.jacobian_power;

    Rng rng(o.sample.seed);
    const EvalOptions opts = eval_options(o);

    // Point pairs come from a CSV file (consecutive rows paired) or are
    // drawn per trial.
    std::vector<std::pair<G2Point, G2Point>> file_pairs;
    if (!o.sample.file.empty()) {
        const auto pts = SampleSet::from_csv(o.sample.file).points;
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
            file_pairs.emplace_back(pts[i], pts[i + 1]);
        if (file_pairs.empty())
            throw DomainError("homogeneity: --points needs at least two rows");
    }

    double quasi = 0.0, factor = 0.0;
    for (int trial = 0; trial < o.trials; ++trial) {
        const AutomorphismMap g(random_moebius(rng));
        const auto pair_sample =
            file_pairs.empty() ? random_pair_sample(rng, 2, 0.8) : file_pairs;
        quasi = std::max(quasi, quasi_invariance_residual(spec, mult, g, pair_sample,
                                                          opts, o.sample.seed)
                                    .max_relative_residual);
        factor = std::max(factor,
                          factorization_test(spec, g, pair_sample, opts, o.sample.seed)
                              .max_relative_residual);
    }
    const bool pass = quasi <= o.tol;
    ordered_json doc{{"kernel", spec.str()},
                     {"kappa", mult.kappa},
                     {"jacobian_power", mult.jacobian_power},
                     {"trials", o.trials},
                     {"seed", o.sample.seed},
                     {"max_residual", quasi},
                     {"factorization_residual", factor},
                     {"tol", o.tol},
                     {"verdict", pass ? "quasi_invariant" : "not_quasi_invariant"}};
    // Fundamental-set curvature identity, via the closed forms where they
    // exist (the weighted Bergman family and its powers).
    try {
        const auto crit = curvature_criterion(
            spec, {0.0, 0.2, 0.4, 0.6, 0.8}, CriterionMethod::ClosedForm);
        doc["curvature_criterion_residual"] = crit.max_relative_residual;
    } catch (const DomainError&) {
    }
    out << doc.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_fundamental(const Options& o, std::ostream& out)
{
    const G2Point u = parse_point(o.u_text);
    const auto fd = to_fundamental(u);
    const G2Point back = aut_apply(fd.g, G2Point(fd.r, 0.0));
    const double residual =
        std::abs(back.u1() - u.u1()) + std::abs(back.u2() - u.u2());
    ordered_json doc{
        {"u", point_json(u)},
        {"r", fd.r},
        {"theta", fd.theta},
        {"g",
         ordered_json{{"t_re", fd.g.base().t().real()},
                      {"t_im", fd.g.base().t().imag()},
                      {"alpha_re", fd.g.base().alpha().real()},
                      {"alpha_im", fd.g.base().alpha().imag()}}},
        {"preimage",
         ordered_json::array({ordered_json::array({fd.preimage[0].value().real(),
                                                   fd.preimage[0].value().imag()}),
                              ordered_json::array({fd.preimage[1].value().real(),
                                                   fd.preimage[1].value().imag()})})},
        {"residual", residual}};
    out << doc.dump(2) << "\n";
    return 0;
}

ordered_json signature_json(const ModuleSpec& m)
{
    const auto s = signature(m);
    return ordered_json{
        {"module", m.str()},
        {"family",
         m.family == ModuleFamily::WeightedPower ? "weighted_power" : "det_curvature"},
        {"lambda", m.lambda},
        {"nu", m.nu},
        {"invariant_pair", ordered_json::array({s.closed_pair[0], s.closed_pair[1]})},
        {"numeric_diagonal_exponent", s.numeric_diagonal_exponent},
        {"paper_diagonal_exponent", s.paper_diagonal_exponent}};
}

int cmd_invariants(const Options& o, std::ostream& out)
{
    out << signature_json(ModuleSpec::parse(o.module_a)).dump(2) << "\n";
    return 0;
}

int cmd_classify(const Options& o, std::ostream& out)
{
    const ModuleSpec a = ModuleSpec::parse(o.module_a);
    const ModuleSpec b = ModuleSpec::parse(o.module_b);
    const auto v = classify(a, b);
    ordered_json doc{{"a", a.str()},
                     {"b", b.str()},
                     {"verdict", v.equivalent ? "equivalent" : "inequivalent"},
                     {"witness", v.witness}};
    out << doc.dump(2) << "\n";
    return v.equivalent ? 0 : 1;
}

int cmd_ke(const Options& o, std::ostream& out)
{
    std::vector<G2Point> points;
    if (!o.sample.file.empty()) {
        points = SampleSet::from_csv(o.sample.file).points;
    } else if (!o.u_list.empty()) {
        for (const auto& s : o.u_list) points.push_back(parse_point(s));
    } else {
        points = {G2Point(0.2, 0.0), G2Point(0.6, 0.0)};
    }
    FDOptions fd;
    fd.step = o.fd_step;
    const auto rep = ke_test(o.lambda, points, fd);
    ordered_json pts = ordered_json::array();
    for (const auto& est : rep.c_estimates) {
        ordered_json ratios = ordered_json::array();
        for (const auto& c : est.ratios)
            ratios.push_back(ordered_json{{"re", c.real()}, {"im", c.imag()}});
        pts.push_back(ordered_json{{"point", point_json(est.point)},
                                   {"ricci", matrix_json(est.ricci)},
                                   {"metric", matrix_json(est.metric)},
                                   {"ratios", ratios}});
    }
    ordered_json doc{{"lambda", o.lambda},
                     {"max_ratio_spread", rep.max_ratio_spread},
                     {"verdict", rep.verdict()},
                     {"points", pts}};
    out << doc.dump(2) << "\n";
    return rep.einstein_consistent ? 0 : 1;
}

int cmd_audit(const Options& o, std::ostream& out)
{
    FDOptions fd;
    fd.step = o.fd_step;
    const auto rows = audit(o.lambda, parse_csv_doubles(o.r_grid), o.nu, fd);
    ordered_json jrows = ordered_json::array();
    std::vector<std::vector<double>> csv_rows;
    std::vector<std::string> tags;
    for (const auto& row : rows) {
        jrows.push_back(ordered_json{{"formula", row.formula},
                                     {"r", row.r},
                                     {"paper", row.paper},
                                     {"oracle", row.oracle},
                                     {"rel_gap", row.rel_gap}});
        csv_rows.push_back({row.r, row.paper, row.oracle, row.rel_gap});
        tags.push_back(row.formula);
    }
    ordered_json doc{{"lambda", o.lambda}, {"nu", o.nu}, {"rows", jrows}};
    out << doc.dump(2) << "\n";
    if (!o.csv.empty()) write_csv(o.csv, "formula,r,paper,oracle,rel_gap", csv_rows, tags);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"numerical workbench for reproducing kernels on the symmetrized "
                 "bidisc"};
    app.require_subcommand(1);
    Options o;

    const auto add_kernel = [&](CLI::App* cmd) {
        cmd->add_option("--kernel", o.kernel, "kernel spec, e.g. bergman:l=2")
            ->required();
    };
    const auto add_numeric = [&](CLI::App* cmd) {
        cmd->add_option("--fd-step", o.fd_step, "finite difference step");
        cmd->add_option("--series-eps", o.series_eps, "raw/series switchover");
        cmd->add_option("--tol", o.tol, "verdict tolerance");
    };

    auto* c_eval = app.add_subcommand("eval", "evaluate a kernel at (u, v)");
    add_kernel(c_eval);
    c_eval->add_option("--u", o.u_text)->required();
    c_eval->add_option("--v", o.v_text);
    add_numeric(c_eval);

    auto* c_curv = app.add_subcommand("curvature", "curvature matrix at u");
    add_kernel(c_curv);
    c_curv->add_option("--u", o.u_text)->required();
    c_curv->add_option("--method", o.method, "determinant method: oracle or paper")
        ->check(CLI::IsMember({"oracle", "paper"}));
    add_numeric(c_curv);

    auto* c_psd = app.add_subcommand("psd", "Gram positivity probe");
    add_kernel(c_psd);
    o.sample.attach(c_psd);
    add_numeric(c_psd);
    c_psd->add_option("--csv", o.csv, "write the sample to CSV");

    auto* c_wal = app.add_subcommand("wallach", "PSD scan of powers of B^(lambda)");
    c_wal->add_option("--lambda", o.lambda)->required();
    c_wal->add_option("--nus", o.nus, "comma-separated exponents");
    o.sample.attach(c_wal);
    add_numeric(c_wal);
    c_wal->add_option("--csv", o.csv, "write the scan rows to CSV");

    auto* c_hom = app.add_subcommand("homogeneity", "quasi-invariance residuals");
    add_kernel(c_hom);
    c_hom->add_option("--random", o.trials, "number of random trials");
    c_hom->add_option("--seed", o.sample.seed, "trial seed (default 7)");
    c_hom->add_option("--points", o.sample.file,
                      "CSV of points; consecutive rows form (u, v) pairs");
    c_hom->add_option("--exponent", o.exponent, "override kappa")
        ->each([&](const std::string&) { o.exponent_set = true; });
    c_hom->add_option("--jacobian-power", o.jacobian_power, "override det power")
        ->each([&](const std::string&) { o.jacobian_power_set = true; });
    add_numeric(c_hom);

    auto* c_fun = app.add_subcommand("fundamental", "fundamental decomposition of u");
    c_fun->add_option("--u", o.u_text)->required();

    auto* c_inv = app.add_subcommand("invariants", "module invariant signature");
    c_inv->add_option("--module", o.module_a, "module spec, e.g. w:l=2,nu=1")
        ->required();

    auto* c_cls = app.add_subcommand("classify", "module equivalence verdict");
    c_cls->add_option("--a", o.module_a)->required();
    c_cls->add_option("--b", o.module_b)->required();

    auto* c_ke = app.add_subcommand("ke", "Kaehler-Einstein test");
    c_ke->add_option("--lambda", o.lambda)->required();
    c_ke->add_option("--u", o.u_list, "test points (repeatable)");
    c_ke->add_option("--points", o.sample.file, "CSV file of test points");
    add_numeric(c_ke);

    auto* c_aud = app.add_subcommand("audit", "printed closed forms vs the differentiation oracle");
    c_aud->add_option("--lambda", o.lambda)->required();
    c_aud->add_option("--nu", o.nu, "det-family exponent for the royal rows");
    c_aud->add_option("--r", o.r_grid, "comma-separated r grid");
    c_aud->add_option("--csv", o.csv, "write the table to CSV");
    add_numeric(c_aud);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (c_eval->parsed()) return cmd_eval(o, out);
        if (c_curv->parsed()) return cmd_curvature(o, out);
        if (c_psd->parsed()) return cmd_psd(o, out);
        if (c_wal->parsed()) return cmd_wallach(o, out);
        if (c_hom->parsed()) return cmd_homogeneity(o, out);
        if (c_fun->parsed()) return cmd_fundamental(o, out);
        if (c_inv->parsed()) return cmd_invariants(o, out);
        if (c_cls->parsed()) return cmd_classify(o, out);
        if (c_ke->parsed()) return cmd_ke(o, out);
        if (c_aud->parsed()) return cmd_audit(o, out);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace g2kern::cli
