#include "cogarch/cli.hpp"

#include "cogarch/errors.hpp"
#include "cogarch/moments.hpp"
#include "cogarch/simulate.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>

namespace cogarch {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::uint64_t seed = 12345;
    unsigned threads = 1;
    bool quiet = false;
};

struct SimulateOptions {
    std::string spec;
    std::string scheme = "mixed";
    double terminal = 0.0;
    std::size_t steps = 0;
    std::string out;
    std::string report;
    std::vector<double> y0;
    bool no_increments = false;
};

struct EstimateOptions {
    std::string data;
    std::string spec_template;
    std::string start;
    std::string objective = "l2";
    int lag_max = 0;
    int lag_width = 1;
    std::string recover = "none";
    std::string out;
    std::string increments_out;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct DiagnoseOptions {
    std::string spec;
    std::vector<int> kappa{1, 2};
    double norm_order = 2.0;
    std::size_t n_mc = 1'000'000;
    std::string out;
};

struct AcfOptions {
    std::string spec;
    std::string data;
    int lag_max = 0;
    int lag_width = 1;
    double dt = 1.0;
    std::string out;
};

Json tool_json() { return {{"name", kToolName}, {"version", kToolVersion}}; }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw ValueError(std::string(what) + " path is required");
    if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " file not found: " + path);
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    fn(out);
    if (!out) throw IoError("write failed for " + path);
}

Json start_theta_json(const Json& j, const CogarchSpec& tmpl) {
    if (j.contains("theta")) return j.at("theta");
    if (!j.contains("b") || !j.contains("a")) throw ValueError("start must contain 'b' and 'a' arrays");
    Json theta = Json::array();
    for (const auto& v : j.at("b")) theta.push_back(v);
    for (const auto& v : j.at("a")) theta.push_back(v);
    if (theta.size() != static_cast<std::size_t>(tmpl.p + tmpl.q))
        throw ValueError("start must give q values for b and p values for a");
    return theta;
}

int run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
    require_file(o.spec, "spec");
    const CogarchSpec spec = spec_from_json(read_json(o.spec));
    const SamplingGrid grid(o.terminal, o.steps);
    const Scheme scheme = parse_scheme(o.scheme);
    std::optional<Vector> y0;
    if (!o.y0.empty()) {
        if (static_cast<int>(o.y0.size()) != spec.q) throw ValueError("y0 must have q entries");
        y0 = Eigen::Map<const Vector>(o.y0.data(), spec.q);
    }

    const Trajectory tr = simulate(spec, grid, scheme, y0, g.seed);
    with_output(o.out, [&](std::ostream& os) { write_trajectory(os, tr, !o.no_increments); });

    const DiagnosticsReport diag = diagnose(spec, {1, 2}, 2.0, 1'000'000, g.seed);
    if (!g.quiet) {
        std::cerr << "stationary=" << to_string(diag.stationary)
                  << " nonnegative=" << to_string(diag.nonnegative_variance)
                  << " unstable=" << (tr.unstable ? "true" : "false");
        if (tr.unstable) std::cerr << " reason=\"" << tr.reason << '"';
        std::cerr << '\n';
    }
    if (!o.report.empty()) {
        Json rep = {{"tool", tool_json()},
                    {"config",
                     {{"subcommand", "simulate"}, {"spec", spec_to_json(spec)}, {"scheme", scheme_name(scheme)},
                      {"terminal", o.terminal}, {"steps", o.steps}, {"seed", g.seed}, {"out", o.out}}},
                    {"dt", grid.dt()},
                    {"unstable", tr.unstable},
                    {"negative_v_count", tr.negative_v_count},
                    {"reason", tr.reason},
                    {"diagnostics", diagnostics_to_json(diag)}};
        write_json(o.report, rep);
    }
    return tr.unstable ? kExitUnstable : kExitOk;
}

int run_estimate(const GlobalOptions& g, const EstimateOptions& o) {
    require_file(o.data, "data");
    require_file(o.spec_template, "spec template");
    if (o.out.empty()) throw ValueError("--out is required");
    const CogarchSpec tmpl = spec_from_json(read_json(o.spec_template));
    const Series series = read_series(o.data);
    const double dt = check_equally_spaced(series.times);

    std::vector<double> start;
    if (o.start.empty()) {
        start = theta_of(tmpl);
    } else {
        require_file(o.start, "start");
        start = start_theta_json(read_json(o.start), tmpl).get<std::vector<double>>();
    }

    GmmOptions opts;
    opts.kind = parse_objective(o.objective);
    opts.r = o.lag_width;
    opts.d = o.lag_max;
    opts.recover = parse_recover(o.recover);
    opts.lower = o.lower;
    opts.upper = o.upper;
    opts.threads = g.threads;

    const GmmFit fit = gmm(series.G, dt, tmpl, start, opts);
    Json rep = fit_to_json(fit);
    rep["tool"] = tool_json();
    rep["config"] = {{"subcommand", "estimate"},
                     {"data", o.data},
                     {"spec_template", spec_to_json(tmpl)},
                     {"start", start},
                     {"objective", objective_name(opts.kind)},
                     {"lag_max", fit.data.acf.d},
                     {"lag_width", opts.r},
                     {"recover", recover_name(opts.recover)},
                     {"dt", dt},
                     {"seed", g.seed},
                     {"threads", g.threads}};
    write_json(o.out, rep);

    if (!o.increments_out.empty()) {
        if (!fit.noise) throw ValueError("--increments-out needs --recover incr or incr+levy");
        with_output(o.increments_out, [&](std::ostream& os) { write_increments(os, fit.noise->increments); });
    }
    const bool levy_failed = opts.recover == Recover::increments_levy && !fit.levy_fit;
    if (!g.quiet)
        std::cerr << "objective=" << objective_name(fit.kind) << " log_objective=" << fit.log_objective
                  << " converged=" << (fit.converged ? "true" : "false") << '\n';
    return fit.converged && !levy_failed ? kExitOk : kExitNoConvergence;
}

int run_diagnose(const GlobalOptions& g, const DiagnoseOptions& o) {
    require_file(o.spec, "spec");
    const CogarchSpec spec = spec_from_json(read_json(o.spec));
    const DiagnosticsReport rep = diagnose(spec, o.kappa, o.norm_order, o.n_mc, g.seed);
    Json j = diagnostics_to_json(rep);
    j["tool"] = tool_json();
    j["config"] = {{"subcommand", "diagnose"}, {"spec", spec_to_json(spec)}, {"kappa", o.kappa},
                   {"norm_order", o.norm_order}, {"n_mc", o.n_mc}, {"seed", g.seed}};
    with_output(o.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return kExitOk;
}

int run_acf(const GlobalOptions&, const AcfOptions& o) {
    if (o.spec.empty() && o.data.empty()) throw ValueError("acf needs --spec, --data or both");
    CsvTable table;
    std::optional<AcfCurve> theory;
    std::optional<EmpiricalAcf> emp;
    double dt = o.dt;
    int d = o.lag_max;

    if (!o.data.empty()) {
        require_file(o.data, "data");
        const Series s = read_series(o.data);
        dt = check_equally_spaced(s.times);
        if (d <= 0) d = default_max_lag(s.G.size() - 1);
        emp = empirical_acf(s.G, o.lag_width, d);
    }
    if (d <= 0) d = 10;
    if (!o.spec.empty()) {
        require_file(o.spec, "spec");
        const CogarchSpec spec = spec_from_json(read_json(o.spec));
        theory = acf_curve({spec, levy_moments(spec.levy), o.lag_width, d, dt});
    }

    table.header = {"h", "acov", "acf"};
    table.columns.assign(3, {});
    const int first = theory ? o.lag_width : 1;
    if (theory && emp) {
        table.header.insert(table.header.end(), {"emp_acov", "emp_acf"});
        table.columns.resize(5);
    }
    for (int h = first; h <= d; ++h) {
        table.columns[0].push_back(h);
        if (theory) {
            const auto i = static_cast<std::size_t>(h - o.lag_width);
            table.columns[1].push_back(theory->autocov[i]);
            table.columns[2].push_back(theory->autocorr[i]);
        }
        if (emp) {
            const auto hu = static_cast<std::size_t>(h);
            const std::size_t base = theory ? 3 : 1;
            table.columns[base].push_back(emp->gamma_hat[hu]);
            table.columns[base + 1].push_back(emp->rho_hat[hu - 1]);
        }
    }
    with_output(o.out, [&](std::ostream& os) { write_csv(os, table); });
    return kExitOk;
}

}  // namespace

Json diagnostics_to_json(const DiagnosticsReport& rep) {
    Json eig = Json::array();
    for (Eigen::Index i = 0; i < rep.eigen.eigenvalues.size(); ++i)
        eig.push_back({{"re", rep.eigen.eigenvalues(i).real()}, {"im", rep.eigen.eigenvalues(i).imag()}});
    Json moments = Json::array();
    for (const auto& m : rep.moments)
        moments.push_back({{"kappa", m.kappa}, {"holds", m.holds}, {"lhs", m.lhs}, {"rhs", m.rhs}, {"margin", m.margin}});
    return {{"eigenvalues", eig},
            {"distinct", rep.eigen.distinct},
            {"all_real", rep.eigen.all_real},
            {"all_negative_real_part", rep.eigen.all_negative_real_part},
            {"condition_estimate", finite_or_null(rep.eigen.condition_estimate)},
            {"stationary",
             {{"status", to_string(rep.stationary)},
              {"lhs", rep.stationarity_lhs},
              {"std_error", rep.stationarity_std_error},
              {"rhs", rep.stationarity_rhs}}},
            {"nonnegative_variance", {{"status", to_string(rep.nonnegative_variance)}, {"rule", rep.nonnegativity_rule}}},
            {"moments", moments},
            {"notes", rep.notes}};
}

Json fit_to_json(const GmmFit& fit) {
    Json coeffs = Json::array();
    for (std::size_t i = 0; i < fit.theta.size(); ++i) {
        Json se = nullptr;
        if (fit.vcov) {
            const double v = (*fit.vcov)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            if (v >= 0.0 && std::isfinite(v)) se = std::sqrt(v);
        }
        coeffs.push_back({{"name", fit.names[i]}, {"estimate", fit.theta[i]}, {"std_error", se}});
    }
    coeffs.push_back({{"name", "a0"}, {"estimate", fit.a0}, {"std_error", nullptr}});

    Json levy = nullptr;
    if (fit.levy_fit) {
        const LevyFit& lf = *fit.levy_fit;
        const auto values = levy_param_values(lf.params);
        Eigen::Index free_idx = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            Json se = nullptr;
            if (lf.free[i]) {
                if (lf.vcov) {
                    const double v = (*lf.vcov)(free_idx, free_idx);
                    if (v >= 0.0 && std::isfinite(v)) se = std::sqrt(v);
                }
                ++free_idx;
            }
            coeffs.push_back({{"name", lf.names[i]}, {"estimate", values[i]}, {"std_error", se}});
        }
        levy = {{"family", family_name(family_of(lf.params))},
                {"loglik", lf.loglik},
                {"minus2loglik", -2.0 * lf.loglik},
                {"at_boundary", lf.at_boundary},
                {"converged", lf.converged}};
    }

    Json incr = nullptr;
    if (fit.noise) {
        const auto& x = fit.noise->increments;
        const double n = static_cast<double>(x.size());
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        incr = {{"count", x.size()}, {"mean", mean}, {"sd", x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0}};
    }

    Json vcov = nullptr;
    if (fit.vcov) {
        vcov = Json::array();
        for (Eigen::Index i = 0; i < fit.vcov->rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < fit.vcov->cols(); ++j) row.push_back(finite_or_null((*fit.vcov)(i, j)));
            vcov.push_back(row);
        }
    }

    return {{"objective", objective_name(fit.kind)},
            {"objective_value", fit.objective},
            {"log_objective", finite_or_null(fit.log_objective)},
            {"converged", fit.converged},
            {"iterations", fit.iterations},
            {"coefficients", coeffs},
            {"vcov", vcov},
            {"increments", incr},
            {"levy", levy},
            {"empirical",
             {{"mu_hat", fit.data.acf.mu_hat},
              {"lag_width", fit.data.acf.r},
              {"lag_max", fit.data.acf.d},
              {"terms", fit.data.acf.terms}}},
            {"spec", spec_to_json(fit.spec)},
            {"notes", fit.notes}};
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"COGARCH(p,q) simulation, diagnostics and moment-based estimation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolVersion));

    GlobalOptions g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for likelihood sums")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", g.quiet, "suppress the summary on standard error");

    SimulateOptions so;
    auto* sim = app.add_subcommand("simulate", "simulate a trajectory to CSV");
    sim->add_option("--spec", so.spec, "model spec JSON")->required();
    sim->add_option("--scheme", so.scheme, "euler | mixed | exact-cp")->capture_default_str();
    sim->add_option("--terminal", so.terminal, "horizon T")->required();
    sim->add_option("--steps", so.steps, "number of grid steps")->required();
    sim->add_option("--out", so.out, "trajectory CSV (stdout if omitted)");
    sim->add_option("--report", so.report, "optional JSON report");
    sim->add_option("--y0", so.y0, "initial state (defaults to the stationary mean)");
    sim->add_flag("--no-increments", so.no_increments, "omit the dL column");

    EstimateOptions eo;
    auto* est = app.add_subcommand("estimate", "fit a model to observed G");
    est->add_option("--data", eo.data, "CSV with columns time,G")->required();
    est->add_option("--spec-template", eo.spec_template, "spec JSON giving orders and driver")->required();
    est->add_option("--start", eo.start, "JSON with b and a start values (template values if omitted)");
    est->add_option("--objective", eo.objective, "l1 | l2 | l2cue")->capture_default_str();
    est->add_option("--lag-max", eo.lag_max, "largest lag d (default floor(sqrt(N)))");
    est->add_option("--lag-width", eo.lag_width, "increment lag r")->capture_default_str();
    est->add_option("--recover", eo.recover, "none | incr | incr+levy")->capture_default_str();
    est->add_option("--out", eo.out, "JSON report")->required();
    est->add_option("--increments-out", eo.increments_out, "CSV of recovered increments");
    est->add_option("--lower", eo.lower, "lower bounds for (b, a)");
    est->add_option("--upper", eo.upper, "upper bounds for (b, a)");

    DiagnoseOptions dopt;
    auto* dia = app.add_subcommand("diagnose", "stationarity, moment and nonnegativity checks");
    dia->add_option("--spec", dopt.spec, "model spec JSON")->required();
    dia->add_option("--kappa", dopt.kappa, "moment orders to check");
    dia->add_option("--norm-order", dopt.norm_order, "matrix norm order r")->capture_default_str();
    dia->add_option("--n-mc", dopt.n_mc, "Monte Carlo draws for compound Poisson")->capture_default_str();
    dia->add_option("--out", dopt.out, "JSON report (stdout if omitted)");

    AcfOptions ao;
    auto* acf = app.add_subcommand("acf", "theoretical and/or empirical ACF of squared increments");
    acf->add_option("--spec", ao.spec, "model spec JSON");
    acf->add_option("--data", ao.data, "CSV with columns time,G");
    acf->add_option("--lag-max", ao.lag_max, "largest lag d");
    acf->add_option("--lag-width", ao.lag_width, "increment lag r")->capture_default_str();
    acf->add_option("--dt", ao.dt, "grid spacing when no data is given")->capture_default_str();
    acf->add_option("--out", ao.out, "CSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitFailure;
    }

    try {
        if (sim->parsed()) return run_simulate(g, so);
        if (est->parsed()) return run_estimate(g, eo);
        if (dia->parsed()) return run_diagnose(g, dopt);
        return run_acf(g, ao);
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: Exception: " << e.what() << '\n';
    }
    return kExitFailure;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back(kToolName);
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace cogarch
