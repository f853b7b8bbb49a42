#include "cli.hpp"

#include "univex/analysis.hpp"
#include "univex/decomposition.hpp"
#include "univex/io.hpp"
#include "univex/perturbation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace univex::cli {

namespace {

using io::Json;

struct Options {
    std::string command;
    std::string verify_kind;
    std::string body, generator, target, out;
    std::string format = "text";
    std::string goal = "universal";
    std::string family = "random";
    std::string matrix;
    int m_max = -1;
    int sphere_degree = -1;
    int rotations = -1;
    int attempts = 100;
    int samples = 64;
    int m = 3;
    int j = 1;
    double tau = kDefaultThreshold;
    double epsilon = 0.1;
    double upper = 2.0;
    double tolerance = -1.0;
    double step = 1e-4;
    std::uint64_t seed = 0;
};

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Output {
    Json document;
    std::function<void(std::ostream&)> csv;
};

/// The math ran but missed its bound; the output is still written.
class ToleranceFailure : public std::runtime_error {
public:
    ToleranceFailure(const std::string& message, Output output) : std::runtime_error(message), output(std::move(output)) {}
    Output output;
};

int default_sphere_degree(int n) { return n == 2 ? 65535 : 255; }

int resolve(int value, int fallback) { return value < 0 ? fallback : value; }
double resolve(double value, double fallback) { return value < 0.0 ? fallback : value; }

SphereQuadrature sphere_rule(const Options& o, int n, int m_max)
{
    const int degree = resolve(o.sphere_degree, default_sphere_degree(n));
    if (degree < 2 * m_max + kProjectionHeadroom)
        throw InputError("--sphere-degree " + std::to_string(degree) + " is too small for order " + std::to_string(m_max)
                         + " (needs at least " + std::to_string(2 * m_max + kProjectionHeadroom) + ")");
    return build_sphere_quadrature(n, degree);
}

/// n = 2: count uniform angles. n = 3: about count ZYZ triples (k even azimuths, k polar nodes, k³ ≈ count).
RotationQuadrature rotation_rule(int n, int count)
{
    if (count < 1) throw InputError("--rotations must be positive");
    if (n == 2) return uniform_rotation_quadrature(count);
    int k = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(count)) - 1e-9));
    const int azimuth = k + (k % 2);
    return euler_rotation_quadrature(azimuth, k);
}

/// Evenly spaced test directions on S¹, or a product grid on S².
SphereQuadrature test_grid(int n) { return build_sphere_quadrature(n, n == 2 ? 2047 : 63); }

Matrix parse_matrix(const std::string& text, int n)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("--matrix: cannot read \"" + item + "\" as a number");
        }
    }
    if (static_cast<int>(values.size()) != n * n)
        throw InputError("--matrix needs " + std::to_string(n * n) + " comma-separated entries (row-major), got "
                         + std::to_string(values.size()));
    Matrix a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = values[static_cast<std::size_t>(r * n + c)];
    return a;
}

io::BodySpec load(const std::string& path, const char* flag)
{
    if (path.empty()) throw InputError(std::string(flag) + " is required for this command");
    return io::read_body_file(path);
}

Json config_json(const Options& o)
{
    Json c;
    c["command"] = o.command;
    if (!o.verify_kind.empty()) c["identity"] = o.verify_kind;
    if (!o.body.empty()) c["body"] = o.body;
    if (!o.generator.empty()) c["generator"] = o.generator;
    if (!o.target.empty()) c["target"] = o.target;
    c["m_max"] = o.m_max;
    c["tau"] = o.tau;
    c["epsilon"] = o.epsilon;
    c["seed"] = o.seed;
    c["rotations"] = o.rotations;
    c["sphere_degree"] = o.sphere_degree;
    c["tolerance"] = o.tolerance;
    c["goal"] = o.goal;
    c["family"] = o.family;
    c["attempts"] = o.attempts;
    c["samples"] = o.samples;
    c["upper"] = o.upper;
    c["m"] = o.m;
    c["j"] = o.j;
    c["step"] = o.step;
    if (!o.matrix.empty()) c["matrix"] = o.matrix;
    c["format"] = o.format;
    c["out"] = o.out;
    return c;
}

void emit(const Options& o, const Output& result, std::ostream& fallback)
{
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) throw InputError("cannot write " + o.out);
    }
    std::ostream& out = o.out.empty() ? fallback : file;
    const Json config = config_json(o);
    if (o.format == "csv") {
        io::write_csv_preamble(out, config);
        result.csv(out);
    } else {
        Json doc;
        doc["tool"] = "univex";
        doc["version"] = kVersion;
        doc["config"] = config;
        doc["result"] = result.document;
        out << io::dump(doc) << '\n';
    }
}

// ---------------------------------------------------------------------------

Output cmd_expand(Options& o)
{
    const auto body = load(o.body, "--body");
    o.m_max = resolve(o.m_max, kDefaultMaxOrder);
    o.sphere_degree = resolve(o.sphere_degree, default_sphere_degree(body.body.dimension()));
    const HarmonicExpansion e = expand(body.body, o.m_max, sphere_rule(o, body.body.dimension(), o.m_max));
    Json doc = io::to_json(e);
    doc["body_id"] = body.id;
    return {doc, [e](std::ostream& s) { io::write_csv(s, e); }};
}

Output cmd_certify(Options& o)
{
    const auto body = load(o.body, "--body");
    o.m_max = resolve(o.m_max, kDefaultMaxOrder);
    o.sphere_degree = resolve(o.sphere_degree, default_sphere_degree(body.body.dimension()));
    const auto cert = certify(body.body, o.m_max, o.tau, sphere_rule(o, body.body.dimension(), o.m_max), body.id);
    return {io::to_json(cert), [cert](std::ostream& s) { io::write_csv(s, cert); }};
}

Output cmd_decompose(Options& o)
{
    const auto generator = load(o.generator, "--generator");
    const auto target = load(o.target, "--target");
    const int n = generator.body.dimension();
    if (target.body.dimension() != n) throw InputError("generator and target live in different dimensions");
    o.m_max = resolve(o.m_max, 8);
    o.sphere_degree = resolve(o.sphere_degree, default_sphere_degree(n));
    o.rotations = resolve(o.rotations, n == 2 ? 1024 : 4096);
    o.tolerance = resolve(o.tolerance, 1e-3);
    const SphereQuadrature q = sphere_rule(o, n, o.m_max);
    const ProfileMode mode = o.goal == "central" ? ProfileMode::central : ProfileMode::universal;
    const GeneratorProfile profile = profile_generator(generator.body, o.m_max, o.tau, q, mode);
    HarmonicExpansion coefficients = expand(target.body, o.m_max, q);
    if (mode == ProfileMode::central) {
        // Orders the generator cannot carry are dropped from the target only when they vanish there.
        for (int m = 1; m <= o.m_max; ++m)
            if (!profile.has_order(m) && coefficients.order_norm(m) <= o.tau) coefficients.block(m).setZero();
    }
    const SphereQuadrature grid = test_grid(n);
    const DecompositionResult result = decompose(profile, coefficients, rotation_rule(n, o.rotations), grid);
    const Residuals against_body = residual_report(result, target.body, grid);
    Json doc = io::to_json(result, generator);
    doc["target_body"] = io::body_to_json(target.body, target.id);
    doc["residual_sup_vs_target_body"] = against_body.sup;
    doc["residual_l2_vs_target_body"] = against_body.l2;
    doc["tolerance"] = o.tolerance;
    doc["within_tolerance"] = result.residual_sup <= o.tolerance;
    Output output{doc, [result](std::ostream& s) { io::write_csv(s, result); }};
    try {
        require_residual(result, o.tolerance);
    } catch (const ToleranceError& e) {
        throw ToleranceFailure(e.what(), output);
    }
    return output;
}

Output cmd_perturb(Options& o)
{
    const auto body = load(o.body, "--body");
    const int n = body.body.dimension();
    o.m_max = resolve(o.m_max, 8);
    o.sphere_degree = resolve(o.sphere_degree, n == 2 ? 16383 : 127);
    const SphereQuadrature q = sphere_rule(o, n, o.m_max);
    const SearchGoal goal = o.goal == "central" ? SearchGoal::central : SearchGoal::universal;

    PerturbationSearchReport report;
    if (o.family == "random") {
        SearchOptions s{o.m_max, o.epsilon, o.tau, o.attempts, o.seed, goal, body.id};
        report = find_universal_image(body.body, s, q);
    } else if (o.family == "scan") {
        ScanOptions s;
        s.m_max = o.m_max;
        s.parity = goal == SearchGoal::central ? Parity::even : Parity::all;
        s.epsilon = o.epsilon;
        s.upper = o.upper;
        s.sample_count = o.samples;
        s.threshold = o.tau;
        s.body_id = body.id;
        report = scan_lambda(body.body, s, q);
    } else {
        if (n != 3) throw InputError("--family lift needs a body in R^3");
        if (goal != SearchGoal::universal) throw InputError("--family lift serves the universal goal");
        SearchOptions plane{o.m_max, o.epsilon, o.tau, o.attempts, o.seed, goal, body.id};
        ScanOptions scan;
        scan.m_max = o.m_max;
        scan.epsilon = o.epsilon;
        scan.upper = o.upper;
        scan.sample_count = o.samples;
        scan.threshold = o.tau;
        scan.body_id = body.id;
        const SphereQuadrature q2 = build_sphere_quadrature(2, 16383);
        report = lift_from_plane(body.body, plane, scan, q2, q);
    }
    Output output{io::to_json(report), [report](std::ostream& s) { io::write_csv(s, report); }};
    if (!report.found()) {
        std::ostringstream msg;
        msg << "no sampled map passed the certificate; failing orders:";
        for (int m : report.failing_orders) msg << ' ' << m;
        throw ToleranceFailure(msg.str(), output);
    }
    return output;
}

Output cmd_scan_f(Options& o)
{
    const auto body = load(o.body, "--body");
    if (body.body.dimension() != 2) throw InputError("scan-f works on planar bodies");
    o.m_max = resolve(o.m_max, 8);
    o.sphere_degree = resolve(o.sphere_degree, default_sphere_degree(2));
    const SphereQuadrature q = sphere_rule(o, 2, o.m_max);
    const Matrix a = o.matrix.empty() ? Matrix(Matrix::Identity(2, 2)) : parse_matrix(o.matrix, 2);
    struct Row {
        int m;
        std::complex<double> f;
        std::optional<DerivativeCheck> d;
    };
    std::vector<Row> rows;
    for (int m = 0; m <= o.m_max; ++m) {
        Row row{m, fourier_moment(body.body, a, m, q), std::nullopt};
        if (m % 2 == 1) row.d = derivative_identity_check(body.body, m, o.step, q);
        rows.push_back(row);
    }
    Json list = Json::array();
    for (const auto& r : rows) {
        Json item{{"m", r.m}, {"re", r.f.real()}, {"im", r.f.imag()}, {"abs", std::abs(r.f)}};
        if (r.d)
            item["derivative_identity"] = {{"lhs", {r.d->lhs.real(), r.d->lhs.imag()}},
                                           {"rhs", {r.d->rhs.real(), r.d->rhs.imag()}},
                                           {"bracket_integral", {r.d->bracket.real(), r.d->bracket.imag()}},
                                           {"error", r.d->error()}};
        list.push_back(item);
    }
    Json doc{{"body_id", body.id}, {"matrix", io::matrix_to_json(a)}, {"moments", list}};
    return {doc, [rows](std::ostream& s) {
                s << "m,re,im,abs,derivative_error\n";
                for (const auto& r : rows)
                    s << r.m << ',' << io::format_double(r.f.real()) << ',' << io::format_double(r.f.imag()) << ','
                      << io::format_double(std::abs(r.f)) << ',' << (r.d ? io::format_double(r.d->error()) : "") << '\n';
            }};
}

Output check(Json doc, double error, double tolerance, const std::string& what)
{
    doc["error"] = error;
    doc["tolerance"] = tolerance;
    doc["pass"] = error <= tolerance;
    Output output{doc, [doc](std::ostream& s) {
                      s << "key,value\n";
                      for (const auto& item : doc.items())
                          if (item.value().is_primitive()) s << item.key() << ',' << io::dump(item.value(), -1) << '\n';
                  }};
    if (!(error <= tolerance))
        throw ToleranceFailure(what + " error " + io::format_double(error) + " exceeds " + io::format_double(tolerance),
                               output);
    return output;
}

Output cmd_verify(Options& o)
{
    const auto body = load(o.body, "--body");
    const int n = body.body.dimension();
    o.sphere_degree = resolve(o.sphere_degree, default_sphere_degree(n));

    if (o.verify_kind == "lemma2") {
        o.tolerance = resolve(o.tolerance, 1e-6);
        o.m_max = resolve(o.m_max, o.m);
        const SphereQuadrature q = sphere_rule(o, n, o.m);
        const Matrix a = o.matrix.empty() ? Matrix(Matrix::Identity(n, n)) : parse_matrix(o.matrix, n);
        const Lemma2Sides sides = verify_lemma2(body.body, o.m, o.j, a, q);
        Json doc{{"body_id", body.id}, {"m", o.m}, {"j", o.j}, {"matrix", io::matrix_to_json(a)},
                 {"lhs", sides.lhs}, {"rhs", sides.rhs}, {"scale", sides.scale}};
        return check(doc, std::abs(sides.lhs - sides.rhs), o.tolerance, "lemma2");
    }
    if (o.verify_kind == "form1") {
        o.tolerance = resolve(o.tolerance, 1e-6);
        o.m_max = resolve(o.m_max, 6);
        o.rotations = resolve(o.rotations, n == 2 ? 1024 : 4096);
        const SphereQuadrature q = sphere_rule(o, n, o.m_max);
        const RotationQuadrature rq = rotation_rule(n, o.rotations);
        Matrix directions;
        if (n == 2) {
            directions.resize(2, 360);
            for (int k = 0; k < 360; ++k) {
                const double phi = 2.0 * std::numbers::pi * k / 360.0;
                directions.col(k) << std::cos(phi), std::sin(phi);
            }
        } else {
            directions = build_sphere_quadrature(3, 17).nodes;
        }
        Json orders = Json::array();
        double worst = 0.0;
        double worst_corrected = 0.0;
        for (int m = 0; m <= o.m_max; ++m) {
            const Form1Check c = check_form1(body.body, m, rq, directions, q);
            worst = std::max(worst, c.stated_error);
            worst_corrected = std::max(worst_corrected, c.corrected_error);
            orders.push_back({{"m", m}, {"stated_error", c.stated_error}, {"corrected_error", c.corrected_error}, {"scale", c.scale}});
        }
        Json doc{{"body_id", body.id}, {"grid_points", directions.cols()}, {"orders", orders},
                 {"corrected_error", worst_corrected}};
        if (n == 2)
            doc["note"] = "with a real basis of the planar order-m space, the Haar integral equals "
                          "1/2[(h,Y_j)Y_i + (h,JY_j)JY_i]; corrected_error measures that identity";
        return check(doc, worst, o.tolerance, "form1");
    }
    o.tolerance = resolve(o.tolerance, 1e-8);
    o.m_max = resolve(o.m_max, 1);
    const SphereQuadrature q = sphere_rule(o, n, 1);
    const SphereQuadrature grid = test_grid(n);
    if (o.verify_kind == "steiner") {
        const Vector s = steiner_point(body.body, q);
        const Vector c = project(body.body, 1, q);
        const Vector from_projection = c.transpose() * harmonic_block(n, 1, grid.nodes);
        const Vector from_point = grid.nodes.transpose() * s;
        Json doc{{"body_id", body.id}, {"steiner_point", std::vector<double>(s.data(), s.data() + s.size())}};
        return check(doc, (from_projection - from_point).cwiseAbs().maxCoeff(), o.tolerance, "steiner");
    }
    const double b = mean_width(body.body, q);
    const double pi0 = project(body.body, 0, q)[0] * eval_harmonic(n, {0, 1}, grid.nodes.col(0));
    Json doc{{"body_id", body.id}, {"mean_width", b}, {"pi0", pi0}};
    return check(doc, std::abs(pi0 - 0.5 * b), o.tolerance, "meanwidth");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"univex: harmonic expansions, universality certificates and rotational Minkowski decompositions"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--m-max", o.m_max, "Highest harmonic order")->check(CLI::NonNegativeNumber);
        sub->add_option("--tau", o.tau, "Certificate threshold")->check(CLI::PositiveNumber);
        sub->add_option("--sphere-degree", o.sphere_degree, "Exact degree of the sphere rule")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", o.out, "Output file (default stdout)");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
    };

    CLI::App* expand_cmd = app.add_subcommand("expand", "Harmonic coefficients of a body");
    expand_cmd->add_option("--body", o.body, "Body file")->required();
    common(expand_cmd);

    CLI::App* certify_cmd = app.add_subcommand("certify", "Per-order norms and universality verdicts");
    certify_cmd->add_option("--body", o.body, "Body file")->required();
    common(certify_cmd);

    CLI::App* decompose_cmd = app.add_subcommand("decompose", "Target + T1 = T2 from rotated copies of a generator");
    decompose_cmd->add_option("--generator", o.generator, "Generator body file")->required();
    decompose_cmd->add_option("--target", o.target, "Target body file")->required();
    decompose_cmd->add_option("--rotations", o.rotations, "Rotation nodes")->check(CLI::PositiveNumber);
    decompose_cmd->add_option("--tolerance", o.tolerance, "Sup residual bound")->check(CLI::PositiveNumber);
    decompose_cmd->add_option("--goal", o.goal, "Generator profile")->check(CLI::IsMember({"universal", "central"}));
    common(decompose_cmd);

    CLI::App* perturb_cmd = app.add_subcommand("perturb", "Search near-identity linear images that certify");
    perturb_cmd->add_option("--body", o.body, "Body file")->required();
    perturb_cmd->add_option("--goal", o.goal, "universal or central")->check(CLI::IsMember({"universal", "central"}));
    perturb_cmd->add_option("--family", o.family, "random, scan or lift")->check(CLI::IsMember({"random", "scan", "lift"}));
    perturb_cmd->add_option("--epsilon", o.epsilon, "Neighbourhood radius")->check(CLI::PositiveNumber);
    perturb_cmd->add_option("--seed", o.seed, "Random seed");
    perturb_cmd->add_option("--attempts", o.attempts, "Random draws")->check(CLI::PositiveNumber);
    perturb_cmd->add_option("--samples", o.samples, "Scan samples")->check(CLI::PositiveNumber);
    perturb_cmd->add_option("--upper", o.upper, "Scan interval (0, a)");
    common(perturb_cmd);

    CLI::App* scan_cmd = app.add_subcommand("scan-f", "F_m(K, A) for a planar body, with the derivative identity");
    scan_cmd->add_option("--body", o.body, "Body file")->required();
    scan_cmd->add_option("--matrix", o.matrix, "A as comma-separated row-major entries");
    scan_cmd->add_option("--step", o.step, "Finite-difference step")->check(CLI::PositiveNumber);
    common(scan_cmd);

    CLI::App* verify_cmd = app.add_subcommand("verify", "Check an identity numerically");
    verify_cmd->require_subcommand(1);
    for (const char* kind : {"lemma2", "form1", "steiner", "meanwidth"}) {
        CLI::App* sub = verify_cmd->add_subcommand(kind);
        sub->add_option("--body", o.body, "Body file")->required();
        sub->add_option("--tolerance", o.tolerance, "Error bound")->check(CLI::PositiveNumber);
        common(sub);
        if (std::string(kind) == "lemma2") {
            sub->add_option("--m", o.m, "Order")->check(CLI::NonNegativeNumber);
            sub->add_option("--j", o.j, "Index")->check(CLI::PositiveNumber);
            sub->add_option("--matrix", o.matrix, "A as comma-separated row-major entries");
        }
        if (std::string(kind) == "form1") sub->add_option("--rotations", o.rotations, "Rotation nodes");
        sub->callback([&o, kind] { o.verify_kind = kind; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    o.command = app.get_subcommands().front()->get_name();
    try {
        Output result;
        if (o.command == "expand") result = cmd_expand(o);
        else if (o.command == "certify") result = cmd_certify(o);
        else if (o.command == "decompose") result = cmd_decompose(o);
        else if (o.command == "perturb") result = cmd_perturb(o);
        else if (o.command == "scan-f") result = cmd_scan_f(o);
        else result = cmd_verify(o);
        emit(o, result, out);
        return kExitOk;
    } catch (const ToleranceFailure& e) {
        try {
            emit(o, e.output, out);
        } catch (const std::exception& ex) {
            err << "error: " << ex.what() << '\n';
        }
        err << "tolerance failure: " << e.what() << '\n';
        return kExitTolerance;
    } catch (const GeneratorError& e) {
        err << "error: generator unusable at order " << e.order() << ": " << e.what() << '\n';
        return kExitInput;
    } catch (const PreconditionError& e) {
        err << "error: precondition not met: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

} // namespace univex::cli
