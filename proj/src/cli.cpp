#include "hpmean/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hpmean/calculus.hpp"
#include "hpmean/dpp.hpp"
#include "hpmean/errors.hpp"
#include "hpmean/fields.hpp"
#include "hpmean/harmonics.hpp"
#include "hpmean/io.hpp"
#include "hpmean/studies.hpp"
#include "hpmean/verification.hpp"

namespace hpmean::cli {

namespace {

using nlohmann::json;
using io::format_double;

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(key + ": '" + text + "' is not a number");
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) items.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(item, key));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& key) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(text, key)) {
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) throw ConfigError(key + ": expected positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

Point parse_point(const std::string& text, const std::string& key) {
    const auto v = parse_doubles(text, key);
    if (v.size() != 3) throw ConfigError(key + ": expected three coordinates x1,x2,x3");
    return {v[0], v[1], v[2]};
}

Exponent parse_exponent(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "inf" || t == "infinity") return Exponent::infinity();
    const double p = parse_double(t, key);
    if (!(p >= 1.0)) throw ConfigError(key + ": p must be >= 1 (or inf), got " + t);
    return Exponent(p);
}

std::string exponent_text(const Exponent& p) { return p.is_infinite() ? "inf" : format_double(p.value()); }

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Execution execution_of(bool serial) { return serial ? Execution::Serial : Execution::Parallel; }

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f.precision(17);
    return f;
}

void write_json(const std::string& path, const json& j) {
    auto f = open_output(path);
    f << j.dump(2) << '\n';
}

// Writes to the named file, or to `out` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty()) {
        fn(out);
        return;
    }
    auto f = open_output(path);
    fn(f);
}

// Flat key=value config --------------------------------------------------------

std::vector<std::string> config_tokens(const std::string& path, CLI::App& sub) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot read '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    for (int lineno = 1; std::getline(f, line); ++lineno) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        const std::string where = path + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty() || key == "config" || key == "help" || !sub.get_option_no_throw("--" + key))
            throw ConfigError(where + ": unknown key '" + key + "' for command " + sub.get_name());
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

// Splices config entries in front of the command-line options so that the
// latter win (every option keeps its last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
    if (args.empty()) return args;
    CLI::App* sub = app.get_subcommand_no_throw(args[0]);
    if (!sub) return args;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) return args;
    std::vector<std::string> out{args[0]};
    const auto tokens = config_tokens(path, *sub);
    out.insert(out.end(), tokens.begin(), tokens.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& about) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", "flat key=value file; command-line options override it");
    return sub;
}

// Domains and data ----------------------------------------------------------------

struct DomainArgs {
    std::string shape = "axis_excluded_annulus";
    std::string center = "0,0,0";
    double inner_radius = 0.5;
    double outer_radius = 1.0;
    double clearance = 0.3;

    void add(CLI::App* sub) {
        sub->add_option("--shape", shape,
                        "koranyi_ball | koranyi_annulus | euclidean_ball | euclidean_annulus | axis_excluded_annulus")
            ->capture_default_str();
        sub->add_option("--center", center, "x1,x2,x3")->capture_default_str();
        sub->add_option("--inner-radius", inner_radius)->capture_default_str();
        sub->add_option("--outer-radius", outer_radius)->capture_default_str();
        sub->add_option("--clearance", clearance, "axis clearance of axis_excluded_annulus")->capture_default_str();
    }

    DomainSpec spec() const {
        DomainSpec s;
        s.kind = shape_kind_from_string(shape);
        s.center = parse_point(center, "center");
        s.outer_radius = outer_radius;
        const bool annulus = s.kind != ShapeKind::KoranyiBall && s.kind != ShapeKind::EuclideanBall;
        s.inner_radius = annulus ? inner_radius : 0.0;
        s.axis_clearance = s.kind == ShapeKind::AxisExcludedAnnulus ? clearance : 0.0;
        s.validate();
        return s;
    }
};

struct DatumArgs {
    std::string datum;
    double inner_value = 0.0;
    double outer_value = 1.0;

    void add(CLI::App* sub, const std::string& key, const std::string& fallback, const std::string& about) {
        datum = fallback;
        sub->add_option("--" + key, datum, about)->capture_default_str();
        sub->add_option("--inner-value", inner_value, "radial datum value on the inner sphere")->capture_default_str();
        sub->add_option("--outer-value", outer_value, "radial datum value on the outer sphere")->capture_default_str();
    }

    Datum make(const std::string& key, const DomainSpec& dom, const Exponent& p) const {
        if (datum.rfind("constant:", 0) == 0) {
            const double c = parse_double(datum.substr(9), key);
            return [c](const Point&) { return c; };
        }
        if (datum.rfind("field:", 0) == 0) {
            const ScalarField f = fields::by_name(datum.substr(6));
            return f.eval;
        }
        if (datum == "radial") {
            if (dom.metric() != Metric::HeisenbergKoranyi || dom.inner_radius <= 0.0)
                throw ConfigError(key + ": radial needs a Korányi annulus");
            const RadialSolution sol =
                fit_radial_coeffs(dom.center, dom.inner_radius, dom.outer_radius, inner_value, outer_value, p);
            return [sol](const Point& x) { return radial_eval(sol, x); };
        }
        if (datum == "rotational") return studies::rotational_test_datum(dom.center);
        throw ConfigError(key + ": expected constant:<c>, field:<name>, radial or rotational, got '" + datum + "'");
    }
};

InitialGuess initial_from_string(const std::string& s) {
    if (s == "mean") return InitialGuess::StripMean;
    if (s == "sup") return InitialGuess::StripSup;
    if (s == "inf") return InitialGuess::StripInf;
    throw ConfigError("initial: expected mean, sup or inf, got '" + s + "'");
}

struct SolveArgs {
    double tol = 0.0;
    std::size_t max_iter = 1000000;
    double pmean_tol = 1e-12;
    std::string initial = "mean";

    void add(CLI::App* sub) {
        sub->add_option("--tol", tol, "sweep change tolerance; 0 picks 1e-9 (1 + range of G)")->capture_default_str();
        sub->add_option("--max-iter", max_iter)->capture_default_str();
        sub->add_option("--pmean-tol", pmean_tol)->capture_default_str();
        sub->add_option("--initial", initial, "mean | sup | inf")->capture_default_str();
    }

    SolveOptions options(bool serial) const {
        if (tol < 0.0) throw ConfigError("tol: must be >= 0");
        if (!(pmean_tol > 0.0)) throw ConfigError("pmean-tol: must be positive");
        if (max_iter == 0) throw ConfigError("max-iter: must be positive");
        SolveOptions o;
        o.tol = tol;
        o.max_iterations = max_iter;
        o.pmean_tol = pmean_tol;
        o.initial = initial_from_string(initial);
        o.execution = execution_of(serial);
        return o;
    }
};

// pmean ----------------------------------------------------------------------------

struct PMeanArgs {
    std::string values;
    std::string samples;
    std::string weights;
    std::string p = "2";
    double tol = 1e-12;
    std::string method = "auto";
    bool continuous = false;
    std::string json_path;
};

SampleSet read_samples(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("samples: cannot read '" + path + "'");
    std::vector<double> values, weights;
    std::string line;
    for (int lineno = 1; std::getline(f, line); ++lineno) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto items = split_list(t);
        if (items.size() > 2) throw ConfigError(where + ": expected 'value' or 'value,weight'");
        values.push_back(parse_double(items[0], where));
        weights.push_back(items.size() == 2 ? parse_double(items[1], where) : 1.0);
    }
    if (values.empty()) throw ConfigError("samples: '" + path + "' holds no samples");
    return SampleSet(std::move(values), std::move(weights));
}

int cmd_pmean(const PMeanArgs& a, std::ostream& out) {
    if (a.values.empty() == a.samples.empty()) throw ConfigError("pmean: give exactly one of --values or --samples");
    std::vector<double> values, weights;
    if (!a.samples.empty()) {
        const SampleSet s = read_samples(a.samples);
        values = s.values();
        weights = s.weights();
    } else {
        values = parse_doubles(a.values, "values");
        if (values.empty()) throw ConfigError("values: empty sample list");
        weights.assign(values.size(), 1.0);
    }
    if (!a.weights.empty()) {
        weights = parse_doubles(a.weights, "weights");
        if (weights.size() != values.size()) throw ConfigError("weights: count differs from the number of values");
    }
    const SampleSet set(values, weights, a.continuous);
    const Exponent p = parse_exponent(a.p, "p");
    PMeanOptions opt;
    if (!(a.tol > 0.0)) throw ConfigError("tol: must be positive");
    opt.tol = a.tol;
    if (a.method == "auto") opt.method = PMeanMethod::Auto;
    else if (a.method == "bisection") opt.method = PMeanMethod::Bisection;
    else if (a.method == "newton") opt.method = PMeanMethod::Newton;
    else throw ConfigError("method: expected auto, bisection or newton, got '" + a.method + "'");

    const PMeanResult r = pmean(set.view(), p, opt);
    out << "p,value,residual,relative_residual,iterations\n"
        << exponent_text(p) << ',' << format_double(r.value) << ',' << format_double(r.residual) << ','
        << format_double(r.relative_residual) << ',' << r.iterations << '\n';
    if (!a.json_path.empty())
        write_json(a.json_path, {{"p", exponent_text(p)},
                                 {"method", a.method},
                                 {"count", values.size()},
                                 {"value", r.value},
                                 {"residual", r.residual},
                                 {"relative_residual", r.relative_residual},
                                 {"iterations", r.iterations}});
    return Success;
}

// amvp -----------------------------------------------------------------------------

struct AmvpArgs {
    std::string field = "x1sq_x2sq";
    std::string point = "1,0,0";
    std::string p = "2";
    std::string metric = "heisenberg";
    std::string eps = "0.4,0.2,0.1,0.05";
    std::size_t resolution = 128;
    std::string floor_resolutions = "96,112";
    double pmean_tol = 1e-13;
    bool serial = false;
    std::string output;
    std::string json_path;
};

int cmd_amvp(const AmvpArgs& a, std::ostream& out) {
    studies::AmvpConfig c;
    c.field = fields::by_name(a.field);
    c.x0 = parse_point(a.point, "point");
    c.p = parse_exponent(a.p, "p");
    c.metric = io::metric_from_string(a.metric);
    c.epsilons = parse_doubles(a.eps, "eps");
    if (c.epsilons.empty()) throw ConfigError("eps: empty list");
    for (double e : c.epsilons)
        if (!(e > 0.0)) throw ConfigError("eps: values must be positive");
    if (a.resolution < 2) throw ConfigError("resolution: must be >= 2");
    c.resolution = a.resolution;
    c.floor_resolutions = parse_sizes(a.floor_resolutions, "floor-resolutions");
    if (!(a.pmean_tol > 0.0)) throw ConfigError("pmean-tol: must be positive");
    c.pmean_tol = a.pmean_tol;
    c.execution = execution_of(a.serial);

    const studies::AmvpReport rep = studies::amvp_study(c);
    const std::string status = rep.degenerate ? "degenerate" : "ok";
    emit(a.output, out, [&](std::ostream& os) {
        os << "epsilon,mean_minus_u,predicted,lattice_leading,remainder,noise_floor,resolved\n";
        for (const auto& r : rep.rows)
            os << format_double(r.epsilon) << ',' << format_double(r.mean_minus_u) << ','
               << format_double(r.predicted) << ',' << format_double(r.lattice_leading) << ','
               << format_double(r.remainder) << ',' << format_double(r.noise_floor) << ',' << (r.resolved ? 1 : 0)
               << '\n';
        os << "# status=" << status << '\n'
           << "# ball_nodes=" << rep.ball_nodes << '\n'
           << "# constant=" << format_double(rep.constant) << '\n'
           << "# normalized_laplacian=" << format_double(rep.laplacian) << '\n'
           << "# leading_order=" << opt_text(rep.leading_order) << '\n'
           << "# leading_coefficient=" << format_double(rep.leading_coefficient) << '\n'
           << "# expected_coefficient=" << format_double(rep.expected_coefficient) << '\n'
           << "# remainder_order=" << opt_text(rep.remainder_order) << '\n'
           << "# remainder_status=" << rep.remainder_status << '\n';
    });
    if (!a.json_path.empty()) {
        json rows = json::array();
        for (const auto& r : rep.rows)
            rows.push_back({{"epsilon", r.epsilon},
                            {"mean_minus_u", r.mean_minus_u},
                            {"predicted", r.predicted},
                            {"lattice_leading", r.lattice_leading},
                            {"remainder", r.remainder},
                            {"noise_floor", r.noise_floor},
                            {"resolved", r.resolved}});
        write_json(a.json_path, {{"field", a.field},
                                 {"point", {c.x0.x1, c.x0.x2, c.x0.x3}},
                                 {"p", exponent_text(c.p)},
                                 {"metric", a.metric},
                                 {"status", status},
                                 {"ball_nodes", rep.ball_nodes},
                                 {"constant", rep.constant},
                                 {"normalized_laplacian", rep.laplacian},
                                 {"leading_order", opt_json(rep.leading_order)},
                                 {"leading_coefficient", rep.leading_coefficient},
                                 {"expected_coefficient", rep.expected_coefficient},
                                 {"remainder_order", opt_json(rep.remainder_order)},
                                 {"remainder_status", rep.remainder_status},
                                 {"rows", rows}});
    }
    return Success;
}

// solve ----------------------------------------------------------------------------

struct SolveCmdArgs {
    DomainArgs domain;
    DatumArgs datum;
    SolveArgs solve;
    std::string p = "3";
    double eps = 0.2;
    double h = 0.0;
    std::string lattice = "axisymmetric";
    double vertical_spacing = 0.0;
    std::size_t reference_resolution = 20;
    bool serial = false;
    std::string csv_path = "solution.csv";
    std::string json_path = "solution.json";
};

int cmd_solve(const SolveCmdArgs& a, std::ostream& out) {
    const DomainSpec spec = a.domain.spec();
    const Exponent p = parse_exponent(a.p, "p");
    const Datum G = a.datum.make("datum", spec, p);
    DiscretizationOptions dopt;
    dopt.lattice = io::lattice_from_string(a.lattice);
    dopt.vertical_spacing = a.vertical_spacing;
    dopt.reference_resolution = a.reference_resolution;
    dopt.execution = execution_of(a.serial);
    const double h = a.h > 0.0 ? a.h : a.eps / 8.0;

    const auto t0 = std::chrono::steady_clock::now();
    const DiscreteDomain dom = discretize(spec, a.eps, h, dopt);
    const SolveResult res = solve(dom, G, p, a.solve.options(a.serial));
    const auto residuals = node_residuals(dom, res.values, p, a.solve.pmean_tol, dopt.execution);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    {
        auto f = open_output(a.csv_path);
        io::write_solution_csv(f, dom, res, residuals);
    }
    if (!a.json_path.empty()) write_json(a.json_path, {{"domain", io::to_json(dom)}, {"result", io::to_json(res)}});
    out << "iterations,final_residual,tol,nodes,interior,seconds\n"
        << res.iterations << ',' << format_double(res.final_residual) << ',' << format_double(res.tol) << ','
        << dom.nodes.size() << ',' << dom.interior_count << ',' << format_double(seconds) << '\n';
    return Success;
}

// converge -------------------------------------------------------------------------

struct ConvergeArgs {
    DomainArgs domain;
    DatumArgs reference;
    SolveArgs solve;
    std::string p = "3";
    std::string eps = "0.2,0.1,0.05";
    std::string lattice = "axisymmetric";
    double h_ratio = 8.0;
    double vertical_coeff = 0.14;
    double vertical_power = 1.5;
    std::size_t reference_resolution = 20;
    bool serial = false;
    std::string output;
    std::string json_path;
};

int cmd_converge(const ConvergeArgs& a, std::ostream& out) {
    studies::ConvergenceConfig c;
    c.domain = a.domain.spec();
    c.p = parse_exponent(a.p, "p");
    c.epsilons = parse_doubles(a.eps, "eps");
    if (c.epsilons.empty()) throw ConfigError("eps: empty list");
    if (!(a.h_ratio >= 8.0)) throw ConfigError("h-ratio: must be >= 8");
    if (a.vertical_coeff < 0.0) throw ConfigError("vertical-coeff: must be >= 0");
    c.plan.lattice = io::lattice_from_string(a.lattice);
    c.plan.h_ratio = a.h_ratio;
    c.plan.vertical_coeff = a.vertical_coeff;
    c.plan.vertical_power = a.vertical_power;
    c.plan.reference_resolution = a.reference_resolution;
    c.plan.execution = execution_of(a.serial);
    c.exact = a.reference.make("reference", c.domain, c.p);
    c.solve = a.solve.options(a.serial);

    const studies::ConvergenceReport rep = studies::convergence_study(c);
    emit(a.output, out, [&](std::ostream& os) {
        os << "epsilon,h,vertical_spacing,nodes,interior,iterations,final_residual,sup_error\n";
        for (const auto& r : rep.rows)
            os << format_double(r.epsilon) << ',' << format_double(r.h) << ',' << format_double(r.vertical_spacing)
               << ',' << r.nodes << ',' << r.interior << ',' << r.iterations << ','
               << format_double(r.final_residual) << ',' << format_double(r.sup_error) << '\n';
        os << "# rate=" << opt_text(rep.rate) << '\n';
    });
    if (!a.json_path.empty()) {
        json rows = json::array();
        for (const auto& r : rep.rows)
            rows.push_back({{"epsilon", r.epsilon},
                            {"h", r.h},
                            {"vertical_spacing", r.vertical_spacing},
                            {"nodes", r.nodes},
                            {"interior", r.interior},
                            {"iterations", r.iterations},
                            {"final_residual", r.final_residual},
                            {"sup_error", r.sup_error},
                            {"seconds", r.seconds}});
        write_json(a.json_path, {{"domain", io::to_json(c.domain)},
                                 {"p", exponent_text(c.p)},
                                 {"reference", a.reference.datum},
                                 {"rate", opt_json(rep.rate)},
                                 {"rows", rows}});
    }
    return Success;
}

// boundary-iter --------------------------------------------------------------------

struct BoundaryIterArgs {
    double mu = 0.5;
    std::string p = "2";
    double eta = 0.1;
    double sup_g = 1.0;
    double inf_g = 0.0;
    double delta = 1.0;
    std::string output;
    std::string json_path;
};

int cmd_boundary_iter(const BoundaryIterArgs& a, std::ostream& out) {
    BoundaryIterationParams params;
    params.mu = a.mu;
    params.p = parse_exponent(a.p, "p");
    params.delta = a.delta;
    params.eta = a.eta;
    params.validate();
    if (!(a.sup_g >= a.inf_g)) throw ConfigError("sup-g: must be >= inf-g");

    const double x = xi(params.p);
    const double th = theta(params.mu, params.p);
    const bool log_limit = theta_uses_log_limit(params.p);
    const int k = k0(params.eta, a.sup_g, a.inf_g, th);
    const auto schedule = iteration_schedule(params, a.sup_g, a.inf_g, k);
    const double delta_k0 = schedule.back().delta_k;

    emit(a.output, out, [&](std::ostream& os) {
        os << "# xi=" << format_double(x) << '\n'
           << "# theta=" << format_double(th) << '\n'
           << "# k0=" << k << '\n'
           << "# delta_k0=" << format_double(delta_k0) << '\n';
        if (log_limit) os << "# caveat=theta is the logarithmic limit at p = 4\n";
        os << "k,delta_k,M_k,gap_k\n";
        for (const auto& s : schedule)
            os << s.k << ',' << format_double(s.delta_k) << ',' << format_double(s.M_k) << ','
               << format_double(s.M_k - a.inf_g) << '\n';
    });
    if (!a.json_path.empty()) {
        json rows = json::array();
        for (const auto& s : schedule)
            rows.push_back({{"k", s.k}, {"delta_k", s.delta_k}, {"M_k", s.M_k}, {"gap_k", s.M_k - a.inf_g}});
        write_json(a.json_path, {{"mu", a.mu},
                                 {"p", exponent_text(params.p)},
                                 {"eta", a.eta},
                                 {"sup_g", a.sup_g},
                                 {"inf_g", a.inf_g},
                                 {"delta", a.delta},
                                 {"xi", x},
                                 {"theta", th},
                                 {"theta_log_limit", log_limit},
                                 {"k0", k},
                                 {"delta_k0", delta_k0},
                                 {"schedule", rows}});
    }
    return Success;
}

// verify ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string criteria;
    std::uint64_t seed = verification::VerifyOptions{}.seed;
    bool serial = false;
    std::string json_path;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    verification::VerifyOptions opt;
    opt.seed = a.seed;
    opt.execution = execution_of(a.serial);
    const auto results = verification::run(split_list(a.criteria), opt, out);
    bool ok = true;
    json rows = json::array();
    for (const auto& r : results) {
        ok = ok && r.passed();
        json checks = json::array();
        for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        rows.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"seconds", r.seconds},
                        {"checks", checks}});
    }
    if (!a.json_path.empty()) write_json(a.json_path, {{"seed", a.seed}, {"criteria", rows}});
    return ok ? Success : NumericalFailure;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Natural p-means, mean value expansions and dynamic programming on the Heisenberg group", "hpmean"};
    app.require_subcommand(1);

    PMeanArgs pm;
    CLI::App* s_pmean = add_command(app, "pmean", "natural p-mean of weighted samples");
    s_pmean->add_option("--values", pm.values, "inline samples, e.g. 0,0,1");
    s_pmean->add_option("--samples", pm.samples, "file with one 'value' or 'value,weight' per line");
    s_pmean->add_option("--weights", pm.weights, "weights matching --values");
    s_pmean->add_option("--p", pm.p, "exponent >= 1 or inf")->capture_default_str();
    s_pmean->add_option("--tol", pm.tol)->capture_default_str();
    s_pmean->add_option("--method", pm.method, "auto | bisection | newton")->capture_default_str();
    s_pmean->add_flag("--continuous", pm.continuous, "samples come from a continuous function (needed for p = 1)");
    s_pmean->add_option("--json", pm.json_path, "JSON result file");

    AmvpArgs am;
    CLI::App* s_amvp = add_command(app, "amvp", "asymptotic mean value expansion sweep over epsilon");
    s_amvp->add_option("--field", am.field, "field registry name")->capture_default_str();
    s_amvp->add_option("--point", am.point, "x1,x2,x3")->capture_default_str();
    s_amvp->add_option("--p", am.p)->capture_default_str();
    s_amvp->add_option("--metric", am.metric, "heisenberg | euclidean")->capture_default_str();
    s_amvp->add_option("--eps", am.eps, "comma-separated radii")->capture_default_str();
    s_amvp->add_option("--resolution", am.resolution, "lattice cells per axis")->capture_default_str();
    s_amvp->add_option("--floor-resolutions", am.floor_resolutions, "resolutions for the noise floor")
        ->capture_default_str();
    s_amvp->add_option("--pmean-tol", am.pmean_tol)->capture_default_str();
    s_amvp->add_flag("--serial", am.serial, "use the serial kernels");
    s_amvp->add_option("--output", am.output, "CSV file (default: stdout)");
    s_amvp->add_option("--json", am.json_path, "JSON report file");

    SolveCmdArgs so;
    CLI::App* s_solve = add_command(app, "solve", "solve the dynamic programming principle on a domain");
    so.domain.add(s_solve);
    so.datum.add(s_solve, "datum", "radial", "constant:<c> | field:<name> | radial | rotational");
    so.solve.add(s_solve);
    s_solve->add_option("--p", so.p)->capture_default_str();
    s_solve->add_option("--eps", so.eps)->capture_default_str();
    s_solve->add_option("--spacing", so.h, "node spacing h; 0 picks eps/8")->capture_default_str();
    s_solve->add_option("--lattice", so.lattice, "full3d | axisymmetric")->capture_default_str();
    s_solve->add_option("--vertical-spacing", so.vertical_spacing, "0 keeps h")->capture_default_str();
    s_solve->add_option("--reference-resolution", so.reference_resolution)->capture_default_str();
    s_solve->add_flag("--serial", so.serial, "use the serial kernels");
    s_solve->add_option("--csv", so.csv_path, "solution CSV")->capture_default_str();
    s_solve->add_option("--json", so.json_path, "domain + result JSON (empty to skip)")->capture_default_str();

    ConvergeArgs cv;
    CLI::App* s_conv = add_command(app, "converge", "sup-error of the DPP solution against a reference solution");
    cv.domain.add(s_conv);
    cv.reference.add(s_conv, "reference", "radial", "radial | field:<name> | constant:<c>");
    cv.solve.add(s_conv);
    s_conv->add_option("--p", cv.p)->capture_default_str();
    s_conv->add_option("--eps", cv.eps)->capture_default_str();
    s_conv->add_option("--lattice", cv.lattice)->capture_default_str();
    s_conv->add_option("--h-ratio", cv.h_ratio, "h = eps / h-ratio")->capture_default_str();
    s_conv->add_option("--vertical-coeff", cv.vertical_coeff, "hv = min(h, coeff eps^power); 0 keeps h")
        ->capture_default_str();
    s_conv->add_option("--vertical-power", cv.vertical_power)->capture_default_str();
    s_conv->add_option("--reference-resolution", cv.reference_resolution)->capture_default_str();
    s_conv->add_flag("--serial", cv.serial);
    s_conv->add_option("--output", cv.output, "CSV file (default: stdout)");
    s_conv->add_option("--json", cv.json_path);

    BoundaryIterArgs bi;
    CLI::App* s_bi = add_command(app, "boundary-iter", "constants and schedule of the boundary iteration");
    s_bi->add_option("--mu", bi.mu)->capture_default_str();
    s_bi->add_option("--p", bi.p)->capture_default_str();
    s_bi->add_option("--eta", bi.eta)->capture_default_str();
    s_bi->add_option("--sup-g", bi.sup_g)->capture_default_str();
    s_bi->add_option("--inf-g", bi.inf_g)->capture_default_str();
    s_bi->add_option("--delta", bi.delta)->capture_default_str();
    s_bi->add_option("--output", bi.output, "CSV file (default: stdout)");
    s_bi->add_option("--json", bi.json_path);

    VerifyArgs ve;
    CLI::App* s_verify = add_command(app, "verify", "run the acceptance checks");
    s_verify->add_option("--criteria", ve.criteria, "ids such as 1,2,gap (default: all)");
    s_verify->add_option("--seed", ve.seed)->capture_default_str();
    s_verify->add_flag("--serial", ve.serial);
    s_verify->add_option("--json", ve.json_path);

    try {
        args = expand_config(args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        for (CLI::App* sub : app.get_subcommands())
            if (sub->parsed()) out << sub->help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "hpmean: " << e.what() << '\n';
        return UsageError;
    } catch (const InvalidArgument& e) {
        err << "hpmean: " << e.what() << '\n';
        return UsageError;
    }

    try {
        if (s_pmean->parsed()) return cmd_pmean(pm, out);
        if (s_amvp->parsed()) return cmd_amvp(am, out);
        if (s_solve->parsed()) return cmd_solve(so, out);
        if (s_conv->parsed()) return cmd_converge(cv, out);
        if (s_bi->parsed()) return cmd_boundary_iter(bi, out);
        if (s_verify->parsed()) return cmd_verify(ve, out);
    } catch (const InvalidArgument& e) {
        err << "hpmean: " << e.what() << '\n';
        return UsageError;
    } catch (const std::exception& e) {
        err << "hpmean: " << e.what() << '\n';
        return NumericalFailure;
    }
    return UsageError;
}

}  // namespace hpmean::cli
