// omsim: probe-response spectra, transparency points, parameter sweeps and
// time-domain validation for a driven cavity with Coulomb-coupled resonators.
//
// Exit codes: 0 success, 2 config/usage error, 3 physics error, 4 oracle mismatch.

#include "omsim/config.hpp"
#include "omsim/csv.hpp"
#include "omsim/errors.hpp"
#include "omsim/group_index.hpp"
#include "omsim/model.hpp"
#include "omsim/oracle.hpp"
#include "omsim/response.hpp"
#include "omsim/steady_state.hpp"
#include "omsim/sweep.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace omsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitOracle = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::string grid = "0.9:1.1:4001";
    unsigned workers = 1;
    bool grid_given = false;
};

json load_document(const CommonArgs& args) {
    json doc;
    if (args.config_path.empty()) {
        doc = to_json(reference_config());
    } else {
        doc = load_config_file(args.config_path);
    }
    for (const auto& o : args.overrides) apply_override(doc, o);
    return doc;
}

DeltaGrid parse_grid(const std::string& text) {
    DeltaGrid g;
    char tail = 0;
    unsigned long long count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%llu%c", &g.start, &g.stop, &count, &tail) != 3 ||
        count == 0) {
        throw Error(ErrorCode::ConfigError, "--grid expects start:stop:count, got '" + text + "'");
    }
    g.count = static_cast<std::size_t>(count);
    return g;
}

fs::path require_out_dir(const CommonArgs& args) {
    if (args.out_dir.empty()) throw Error(ErrorCode::ConfigError, "--out <dir> is required");
    fs::create_directories(args.out_dir);
    return fs::path(args.out_dir);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
}

std::string f17(double v) { return format_double(v); }

json report_json(const TransparencyReport& rep, double omega1) {
    json pts = json::array();
    for (const auto& pt : rep.points) {
        pts.push_back({{"delta_rad_s", pt.delta},
                       {"delta_over_omega1", pt.delta / omega1},
                       {"absorption", pt.absorption},
                       {"slope_s", pt.slope},
                       {"regime", to_string(pt.regime)}});
    }
    return pts;
}

json steady_summary(const SteadyState& s) {
    return {{"q1s_m", s.q1s},
            {"q2s_m", s.q2s},
            {"re_a_s", s.a_s.real()},
            {"im_a_s", s.a_s.imag()},
            {"n_cav", s.n_cav},
            {"effective_detuning_rad_s", s.effective_detuning},
            {"branch", to_string(s.branch)},
            {"static_stable", s.stable},
            {"dynamical_stability_checked", false}};
}

int run_params(const CommonArgs& args) {
    const RunConfig cfg = parse_run_config(load_document(args));
    const ModelParams p = build_params(cfg.raw);
    const auto& r = p.raw;
    std::ostringstream os;
    auto line = [&](const char* name, double v, const char* unit) {
        os << name << " = " << f17(v) << ' ' << unit << '\n';
    };
    line("pump_wavelength", r.pump_wavelength, "m");
    line("cavity_length", r.cavity_length, "m");
    line("omega1", r.omega1, "rad/s");
    line("omega2", r.omega2, "rad/s");
    line("Q1", r.Q1, "");
    line("Q2", r.Q2, "");
    line("m1", r.m1, "kg");
    line("m2", r.m2, "kg");
    line("kappa", r.kappa, "rad/s");
    line("pump_power", r.pump_power, "W");
    line("probe_power", r.probe_power, "W");
    line("coulomb_lambda", r.coulomb_lambda, "rad s^-1 m^-2");
    os << "detuning_mode = " << to_string(r.detuning_mode) << '\n';
    line("detuning_value", r.detuning_value, "rad/s");
    line("omega_a", p.omega_a, "rad/s");
    line("g", p.g, "rad s^-1 m^-1");
    line("gamma1", p.gamma1, "rad/s");
    line("gamma2", p.gamma2, "rad/s");
    line("eps_l", p.eps_l, "s^-1/2");
    line("eps_s", p.eps_s, "s^-1/2");
    line("coulomb_stiffness", p.coulomb_stiffness, "N/m");
    line("D", p.effective_stiffness, "N/m");
    line("coulomb_threshold", coulomb_threshold(p), "rad s^-1 m^-2");
    std::cout << os.str();
    if (!args.out_dir.empty()) {
        const auto dir = require_out_dir(args);
        json doc = to_json(r);
        doc["derived"] = {{"omega_a", p.omega_a},     {"g", p.g},
                          {"gamma1", p.gamma1},       {"gamma2", p.gamma2},
                          {"eps_l", p.eps_l},         {"eps_s", p.eps_s},
                          {"D", p.effective_stiffness}};
        write_text(dir / "params.json", doc.dump(2) + "\n");
    }
    return kExitOk;
}

int run_spectrum(const CommonArgs& args) {
    const RunConfig cfg = parse_run_config(load_document(args));
    const DeltaGrid grid = parse_grid(args.grid);
    const auto dir = require_out_dir(args);
    const ModelParams p = build_params(cfg.raw);
    const SteadyState s = solve_configured(p, cfg.branch);
    const Spectrum sp = spectrum(p, s, grid, args.workers);

    std::ostringstream csv;
    write_spectrum_csv(csv, sp, p.raw.omega1);
    write_text(dir / "spectrum.csv", csv.str());

    json summary = {{"points", sp.points.size()}, {"steady", steady_summary(s)}};
    std::size_t failed = 0;
    for (const auto& pt : sp.points) failed += pt.error ? 1 : 0;
    summary["failed_points"] = failed;
    TransparencyOptions topts;
    topts.window_start = grid.start;
    topts.window_stop = grid.stop;
    topts.threshold = cfg.transparency_threshold;
    try {
        const auto rep = find_transparency_points(p, s, topts);
        summary["minima"] = report_json(rep, p.raw.omega1);
        std::cout << "transparency points: " << rep.size() << '\n';
        for (const auto& pt : rep.points) {
            std::cout << "  delta/omega1 = " << f17(pt.delta / p.raw.omega1)
                      << "  Re[eps_R] = " << f17(pt.absorption) << "  slope = " << f17(pt.slope)
                      << " s  (" << to_string(pt.regime) << ")\n";
        }
    } catch (const Error& e) {
        summary["minima"] = json::array();
        summary["minima_error"] = e.what();
        std::cout << "transparency points: none (" << e.what() << ")\n";
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "wrote " << (dir / "spectrum.csv").string() << " (" << sp.points.size()
              << " points)\n";
    return kExitOk;
}

int run_transparency(const CommonArgs& args) {
    const RunConfig cfg = parse_run_config(load_document(args));
    const DeltaGrid grid = parse_grid(args.grid);
    const ModelParams p = build_params(cfg.raw);
    const SteadyState s = solve_configured(p, cfg.branch);
    TransparencyOptions topts;
    topts.window_start = grid.start;
    topts.window_stop = grid.stop;
    topts.coarse_points = grid.count;
    topts.threshold = cfg.transparency_threshold;
    const auto rep = find_transparency_points(p, s, topts);

    std::cout << "effective detuning / omega1 = " << f17(s.effective_detuning / p.raw.omega1) << '\n';
    std::cout << "delta/omega1,Re_eps_R,slope_s,regime\n";
    for (const auto& pt : rep.points) {
        std::cout << f17(pt.delta / p.raw.omega1) << ',' << f17(pt.absorption) << ','
                  << f17(pt.slope) << ',' << to_string(pt.regime) << '\n';
    }
    if (auto gap = rep.gap()) std::cout << "gap/omega1 = " << f17(*gap / p.raw.omega1) << '\n';
    if (!args.out_dir.empty()) {
        const auto dir = require_out_dir(args);
        json doc = {{"steady", steady_summary(s)}, {"points", report_json(rep, p.raw.omega1)}};
        write_text(dir / "transparency.json", doc.dump(2) + "\n");
    }
    return kExitOk;
}

std::string axis_cells(const RunRecord& rec, const PointResult& pt) {
    std::string out = std::to_string(pt.index);
    for (std::size_t k = 0; k < rec.axis_names.size(); ++k) out += ',' + f17(pt.axis_values[k]);
    return out;
}

std::string axis_header(const RunRecord& rec) {
    std::string out = "point_index";
    for (const auto& name : rec.axis_names) out += ',' + name;
    return out;
}

int run_sweep(const CommonArgs& args) {
    const json doc = load_document(args);
    SweepPlan plan = plan_from_config(doc);
    const bool config_grid = doc.contains("sweep") && doc["sweep"].contains("grid");
    if (args.grid_given || !config_grid) plan.grid = parse_grid(args.grid);
    const auto dir = require_out_dir(args);
    const RunRecord rec = execute(plan, args.workers);

    write_text(dir / "plan.json", to_json(plan).dump(2) + "\n");
    write_text(dir / "record.json", to_json(rec).dump(1) + "\n");

    if (plan.wants(SweepOutput::Spectrum)) {
        std::ostringstream os;
        os << spectrum_header << ',' << axis_header(rec) << '\n';
        for (const auto& pt : rec.points) {
            if (!pt.spectrum) continue;
            const std::string tail = axis_cells(rec, pt);
            for (const auto& r : pt.spectrum->points) {
                os << f17(r.delta) << ',' << f17(r.delta / plan.base.omega1 - 1.0) << ','
                   << f17(r.eps_R.real()) << ',' << f17(r.eps_R.imag()) << ','
                   << f17(r.a_plus.real()) << ',' << f17(r.a_plus.imag()) << ',' << tail << '\n';
            }
        }
        write_text(dir / "spectrum.csv", os.str());
    }
    if (plan.wants(SweepOutput::Transparency)) {
        std::ostringstream os;
        os << "n_points,omega_minus_rad_s,omega_plus_rad_s,absorption_minus,absorption_plus,"
              "slope_minus_s,slope_plus_s,gap_rad_s,"
           << axis_header(rec) << '\n';
        for (const auto& pt : rec.points) {
            const double nan = std::nan("");
            TransparencyPoint lo{nan, nan, nan, Regime::Fast}, hi = lo;
            std::size_t n = 0;
            if (pt.transparency) {
                n = pt.transparency->size();
                lo = pt.transparency->points.front();
                hi = pt.transparency->points.back();
            }
            os << n << ',' << f17(lo.delta) << ',' << f17(hi.delta) << ',' << f17(lo.absorption)
               << ',' << f17(hi.absorption) << ',' << f17(lo.slope) << ',' << f17(hi.slope) << ','
               << f17(n >= 2 ? hi.delta - lo.delta : nan) << ',' << axis_cells(rec, pt) << '\n';
        }
        write_text(dir / "transparency.csv", os.str());
    }
    if (plan.wants(SweepOutput::GroupMetric)) {
        std::ostringstream os;
        os << group_metric_header << ',' << axis_header(rec) << '\n';
        std::cout << axis_header(rec) << ",metric_minus_s,metric_plus_s,regime\n";
        for (const auto& pt : rec.points) {
            if (pt.group_metric.size() != 2) {
                std::cout << axis_cells(rec, pt) << ",nan,nan,error\n";
                continue;
            }
            const auto row = group_metric_row(pt.group_metric[0], pt.group_metric[1]);
            os << row << ',' << axis_cells(rec, pt) << '\n';
            std::cout << axis_cells(rec, pt) << ',' << f17(pt.group_metric[0].metric) << ','
                      << f17(pt.group_metric[1].metric) << ','
                      << row.substr(row.rfind(',') + 1) << '\n';
        }
        write_text(dir / "group_metric.csv", os.str());
    }
    std::size_t failed = 0;
    for (const auto& pt : rec.points) failed += pt.errors.empty() ? 0 : 1;
    std::cout << "sweep: " << rec.points.size() << " points, " << failed
              << " with errors, plan " << rec.plan_hash << '\n';
    return kExitOk;
}

// Negative control for the oracle: flips the sign of the radiation-pressure
// term in the a_plus denominator.
std::complex<double> corrupted_a_plus(const ModelParams& p, double effective_detuning, double delta) {
    const SteadyState s = solve_direct(p, effective_detuning);
    const std::complex<double> I(0.0, 1.0);
    const double strength = constants::hbar * p.g * p.g * s.n_cav;
    const auto den = std::complex<double>(p.raw.kappa, effective_detuning - delta) +
                     I * strength / (chi_A(p, delta) * factor_B(p, s, delta));
    return 1.0 / den;
}

int run_validate(const CommonArgs& args, bool corrupt, std::size_t dump_stride) {
    const RunConfig cfg = parse_run_config(load_document(args));
    const ModelParams p = build_params(cfg.raw);
    const SteadyState s = solve_configured(p, cfg.branch);
    const double detuning = s.effective_detuning;

    ValidateOptions vopts;
    vopts.oracle_requested = true;
    const auto report = validate(p, vopts);
    if (report.contains(ViolationKind::WeakProbeViolated)) {
        std::cerr << "warning: eps_s / eps_l = " << f17(p.eps_s / p.eps_l)
                  << "; the probe is too strong for linear response\n";
    }

    AnalyticAPlus analytic = [](const ModelParams& q, double d, double delta) {
        return a_plus(q, solve_direct(q, d), delta);
    };
    if (corrupt) analytic = corrupted_a_plus;

    CrossValidateOptions copts;
    copts.workers = args.workers;
    const auto deltas = default_oracle_deltas(p);
    const auto table = cross_validate(p, detuning, deltas, analytic, copts);

    std::cout << "delta/omega1,re_analytic,im_analytic,re_oracle,im_oracle,rel_error\n";
    for (const auto& row : table.rows) {
        std::cout << f17(row.delta / p.raw.omega1) << ',' << f17(row.analytic.real()) << ','
                  << f17(row.analytic.imag()) << ',' << f17(row.oracle.real()) << ','
                  << f17(row.oracle.imag()) << ',' << f17(row.rel_error);
        if (row.error) std::cout << "  # " << *row.error;
        std::cout << '\n';
    }
    std::cout << "max relative error = " << f17(table.max_rel_error) << " (tolerance "
              << f17(table.tolerance) << ")\n";

    if (!args.out_dir.empty()) {
        const auto dir = require_out_dir(args);
        json rows = json::array();
        for (const auto& row : table.rows) {
            rows.push_back({{"delta_rad_s", row.delta},
                            {"analytic", {row.analytic.real(), row.analytic.imag()}},
                            {"oracle", {row.oracle.real(), row.oracle.imag()}},
                            {"a_minus_est", {row.demod.a_minus_est.real(), row.demod.a_minus_est.imag()}},
                            {"residual_dc", {row.demod.residual_dc.real(), row.demod.residual_dc.imag()}},
                            {"rel_error", std::isfinite(row.rel_error) ? json(row.rel_error) : json(nullptr)},
                            {"steps", row.stats.steps},
                            {"rejected_steps", row.stats.rejected},
                            {"error", row.error ? json(*row.error) : json(nullptr)}});
        }
        json doc = {{"rows", rows}, {"max_rel_error", table.max_rel_error}, {"pass", table.pass}};
        write_text(dir / "validate.json", doc.dump(2) + "\n");
        if (dump_stride > 0) {
            // Re-runs the first detuning with a decimated trajectory dump.
            const double period = 2.0 * constants::pi / std::abs(deltas.front());
            IntegrationOptions io;
            io.sample_dt = period / 64.0;
            io.stride = dump_stride;
            const auto traj = integrate_mean_dynamics(p, detuning, p.eps_s, deltas.front(),
                                                      20.0 * period, io);
            std::ostringstream os;
            write_trajectory_csv(os, traj);
            write_text(dir / "trajectory.csv", os.str());
        }
    }
    return table.pass ? kExitOk : kExitOracle;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probe response of an optomechanical cavity with Coulomb-coupled resonators"};
    app.require_subcommand(1);

    CommonArgs args;
    bool corrupt = false;
    std::size_t dump_stride = 0;

    auto add_common = [&](CLI::App* sub, bool with_grid) {
        sub->add_option("--config", args.config_path, "JSON config (default: built-in reference parameters)");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--set", args.overrides, "override key=value (repeatable)")->take_all();
        sub->add_option("--workers", args.workers, "worker threads")->check(CLI::Range(1u, 256u));
        if (with_grid) sub->add_option("--grid", args.grid, "probe grid start:stop:count in units of omega1");
    };

    auto* params = app.add_subcommand("params", "print raw and derived parameters");
    add_common(params, false);
    auto* spec = app.add_subcommand("spectrum", "absorption/dispersion spectrum to CSV");
    add_common(spec, true);
    auto* transp = app.add_subcommand("transparency", "locate the zero-absorption points");
    add_common(transp, true);
    auto* sweep = app.add_subcommand("sweep", "batch scan described by the config's sweep block");
    add_common(sweep, true);
    auto* val = app.add_subcommand("validate", "compare a_plus against the time-domain oracle");
    add_common(val, false);
    val->add_flag("--corrupt-a-plus", corrupt, "negative control: use a wrong analytic formula")
        ->group("");
    val->add_option("--dump-trajectory", dump_stride, "write trajectory.csv keeping every n-th sample");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    args.grid_given = sweep->get_option("--grid")->count() > 0;

    try {
        if (*params) return run_params(args);
        if (*spec) return run_spectrum(args);
        if (*transp) return run_transparency(args);
        if (*sweep) return run_sweep(args);
        if (*val) return run_validate(args, corrupt, dump_stride);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_physics_error(e.code()) ? kExitPhysics : kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
