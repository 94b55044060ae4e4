#include "omsim/sweep.hpp"

#include "omsim/errors.hpp"
#include "omsim/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace omsim {

std::string to_string(AxisField f) {
    switch (f) {
    case AxisField::PumpPower: return "pump_power";
    case AxisField::CoulombLambda: return "coulomb_lambda";
    case AxisField::DetuningValue: return "detuning_value";
    }
    return "pump_power";
}

std::string to_string(SweepOutput o) {
    switch (o) {
    case SweepOutput::Spectrum: return "spectrum";
    case SweepOutput::Transparency: return "transparency";
    case SweepOutput::GroupMetric: return "group_metric";
    }
    return "spectrum";
}

namespace {

std::optional<AxisField> axis_field_from(const std::string& s) {
    for (auto f : {AxisField::PumpPower, AxisField::CoulombLambda, AxisField::DetuningValue}) {
        if (to_string(f) == s) return f;
    }
    return std::nullopt;
}

std::optional<SweepOutput> output_from(const std::string& s) {
    for (auto o : {SweepOutput::Spectrum, SweepOutput::Transparency, SweepOutput::GroupMetric}) {
        if (to_string(o) == s) return o;
    }
    return std::nullopt;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void check_plan(const SweepPlan& plan) {
    if (plan.axes.size() > 3) throw Error(ErrorCode::InvalidArgument, "at most three sweep axes");
    for (std::size_t i = 0; i < plan.axes.size(); ++i) {
        const auto& ax = plan.axes[i];
        if (ax.count == 0) throw Error(ErrorCode::InvalidArgument, "axis count must be >= 1");
        for (std::size_t j = 0; j < i; ++j) {
            if (plan.axes[j].field == ax.field) {
                throw Error(ErrorCode::InvalidArgument, "axis " + to_string(ax.field) + " declared twice");
            }
        }
    }
    if (plan.point_count() > plan.budget) {
        throw Error(ErrorCode::BudgetExceeded, "plan has " + std::to_string(plan.point_count()) +
                                                   " points, budget is " + std::to_string(plan.budget));
    }
}

RawConfig apply_axes(RawConfig raw, const std::vector<Axis>& axes, const std::vector<double>& values) {
    for (std::size_t k = 0; k < axes.size(); ++k) {
        switch (axes[k].field) {
        case AxisField::PumpPower: raw.pump_power = values[k]; break;
        case AxisField::CoulombLambda: raw.coulomb_lambda = values[k]; break;
        case AxisField::DetuningValue: raw.detuning_value = values[k]; break;
        }
    }
    return raw;
}

PointResult run_point(const SweepPlan& plan, std::size_t index, std::vector<double> axis_values) {
    PointResult out;
    out.index = index;
    out.axis_values = std::move(axis_values);
    try {
        const ModelParams p = build_params(apply_axes(plan.base, plan.axes, out.axis_values));
        const SteadyState s = solve_configured(p, plan.branch);
        out.steady = s;
        if (plan.wants(SweepOutput::Spectrum)) out.spectrum = spectrum(p, s, plan.grid);
        if (plan.wants(SweepOutput::Transparency)) {
            try {
                out.transparency = find_transparency_points(p, s, plan.transparency);
            } catch (const Error& e) {
                out.errors.push_back(std::string("transparency: ") + e.what());
            }
        }
        if (plan.wants(SweepOutput::GroupMetric)) {
            GroupMetricOptions gopts;
            gopts.transparency = plan.transparency;
            gopts.scale = plan.metric_scale;
            out.group_metric = evaluate_group_metric(p, s, gopts);
            if (out.group_metric.front().error) {
                out.errors.push_back("group_metric: " + *out.group_metric.front().error);
            }
        }
    } catch (const Error& e) {
        out.errors.push_back(e.what());
    }
    return out;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json steady_json(const SteadyState& s) {
    return {{"q1s", s.q1s},
            {"q2s", s.q2s},
            {"p1s", s.p1s},
            {"p2s", s.p2s},
            {"re_a_s", s.a_s.real()},
            {"im_a_s", s.a_s.imag()},
            {"n_cav", s.n_cav},
            {"effective_detuning", s.effective_detuning},
            {"branch", to_string(s.branch)},
            {"stable", s.stable},
            {"dynamical_stability_checked", s.dynamical_stability_checked}};
}

json spectrum_json(const Spectrum& sp) {
    json delta = json::array(), re_e = json::array(), im_e = json::array(), re_a = json::array(),
         im_a = json::array(), errors = json::array();
    for (std::size_t i = 0; i < sp.points.size(); ++i) {
        const auto& pt = sp.points[i];
        delta.push_back(pt.delta);
        re_e.push_back(number_or_null(pt.eps_R.real()));
        im_e.push_back(number_or_null(pt.eps_R.imag()));
        re_a.push_back(number_or_null(pt.a_plus.real()));
        im_a.push_back(number_or_null(pt.a_plus.imag()));
        if (pt.error) errors.push_back({{"index", i}, {"error", *pt.error}});
    }
    return {{"params_hash", hex64(sp.params_hash)},
            {"delta_rad_s", delta},
            {"re_eps_R", re_e},
            {"im_eps_R", im_e},
            {"re_a_plus", re_a},
            {"im_a_plus", im_a},
            {"errors", errors}};
}

json transparency_json(const TransparencyReport& rep) {
    json pts = json::array();
    for (const auto& pt : rep.points) {
        pts.push_back({{"delta_rad_s", pt.delta},
                       {"absorption", pt.absorption},
                       {"slope_s", pt.slope},
                       {"regime", to_string(pt.regime)}});
    }
    return {{"points", pts}};
}

json group_metric_json(const std::vector<GroupMetricPoint>& gm) {
    json out = json::array();
    for (const auto& g : gm) {
        json e = {{"mode", g.mode == Mode::Minus ? "minus" : "plus"},
                  {"pump_power_W", g.pump_power},
                  {"delta_eval_rad_s", number_or_null(g.delta_eval)},
                  {"metric_s", number_or_null(g.metric)}};
        if (g.ng_scaled) e["ng_scaled"] = number_or_null(*g.ng_scaled);
        if (g.error) e["error"] = *g.error;
        out.push_back(e);
    }
    return out;
}

void diff_walk(const json& a, const json& b, const std::string& path, double rel_tol,
               DiffReport& report) {
    if (a.is_object() && b.is_object()) {
        for (const auto& [key, _] : a.items()) {
            if (!b.contains(key)) throw Error(ErrorCode::ShapeMismatch, "key '" + key + "' missing at " + path);
        }
        for (const auto& [key, _] : b.items()) {
            if (!a.contains(key)) throw Error(ErrorCode::ShapeMismatch, "key '" + key + "' missing at " + path);
        }
        for (const auto& [key, value] : a.items()) {
            if (path.empty() && key == "wall_time_s") continue;
            diff_walk(value, b.at(key), path.empty() ? key : path + "." + key, rel_tol, report);
        }
        return;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) {
            throw Error(ErrorCode::ShapeMismatch, "array length differs at " + path + " (" +
                                                      std::to_string(a.size()) + " vs " +
                                                      std::to_string(b.size()) + ")");
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            diff_walk(a[i], b[i], path + "[" + std::to_string(i) + "]", rel_tol, report);
        }
        return;
    }
    if (a.is_null() != b.is_null()) {
        report.entries.push_back({path, a, b});
        return;
    }
    if (a.is_structured() || b.is_structured()) {
        throw Error(ErrorCode::ShapeMismatch, "structure differs at " + path);
    }
    bool same;
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        same = std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
    } else {
        same = a == b;
    }
    if (!same) report.entries.push_back({path, a, b});
}

} // namespace

std::vector<double> Axis::values() const {
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "axis count must be >= 1");
    if (count == 1) return {start};
    if (scale == AxisScale::Log && !(start > 0.0 && stop > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "log axis " + to_string(field) + " needs positive bounds");
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = scale == AxisScale::Linear
                     ? start + (stop - start) * f
                     : std::exp(std::log(start) + (std::log(stop) - std::log(start)) * f);
    }
    out.back() = stop;
    return out;
}

bool SweepPlan::wants(SweepOutput o) const {
    return std::find(outputs.begin(), outputs.end(), o) != outputs.end();
}

std::size_t SweepPlan::point_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= ax.count;
    return n;
}

RunRecord execute(const SweepPlan& plan, unsigned workers) {
    check_plan(plan);
    const auto started = std::chrono::steady_clock::now();

    std::vector<std::vector<double>> axis_values;
    for (const auto& ax : plan.axes) axis_values.push_back(ax.values());

    const std::size_t n = plan.point_count();
    RunRecord record;
    record.plan_hash = plan_hash(plan);
    record.code_version = OMSIM_VERSION;
    for (const auto& ax : plan.axes) record.axis_names.push_back(to_string(ax.field));
    record.points.resize(n);

    detail::parallel_for(n, workers, [&](std::size_t index) {
        // Row-major: the last axis varies fastest.
        std::vector<double> values(plan.axes.size());
        std::size_t rest = index;
        for (std::size_t k = plan.axes.size(); k-- > 0;) {
            values[k] = axis_values[k][rest % plan.axes[k].count];
            rest /= plan.axes[k].count;
        }
        record.points[index] = run_point(plan, index, std::move(values));
    });

    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
}

SweepPlan plan_from_config(const json& doc) {
    const RunConfig cfg = parse_run_config(doc);
    SweepPlan plan;
    plan.base = cfg.raw;
    plan.branch = cfg.branch;
    plan.metric_scale = cfg.metric_scale;
    plan.transparency.threshold = cfg.transparency_threshold;

    const json sweep = doc.value("sweep", json::object());
    if (!sweep.is_object()) config_error("'sweep' must be an object");
    for (const auto& [key, _] : sweep.items()) {
        if (key != "axes" && key != "outputs" && key != "grid" && key != "budget") {
            config_error("unknown sweep key '" + key + "'");
        }
    }
    try {
        for (const auto& ax : sweep.value("axes", json::array())) {
            Axis axis;
            const auto name = ax.at("field").get<std::string>();
            const auto field = axis_field_from(name);
            if (!field) config_error("axis field '" + name + "' is not sweepable");
            axis.field = *field;
            axis.count = ax.value("count", std::size_t{1});
            const auto scale = ax.value("scale", std::string("linear"));
            if (scale == "linear") {
                axis.scale = AxisScale::Linear;
            } else if (scale == "log") {
                axis.scale = AxisScale::Log;
            } else {
                config_error("axis scale must be linear or log");
            }
            axis.start = ax.at("start").get<double>();
            axis.stop = ax.value("stop", axis.start);
            if (axis.field == AxisField::DetuningValue) {
                axis.start = to_angular(doc, "detuning_value", axis.start, plan.base.omega1);
                axis.stop = to_angular(doc, "detuning_value", axis.stop, plan.base.omega1);
            }
            plan.axes.push_back(axis);
        }
        for (const auto& o : sweep.value("outputs", json::array())) {
            const auto out = output_from(o.get<std::string>());
            if (!out) config_error("unknown sweep output '" + o.get<std::string>() + "'");
            if (!plan.wants(*out)) plan.outputs.push_back(*out);
        }
        if (sweep.contains("grid")) {
            const auto& g = sweep.at("grid");
            plan.grid = {g.at("start").get<double>(), g.at("stop").get<double>(),
                         g.at("count").get<std::size_t>()};
        }
        plan.budget = sweep.value("budget", plan.budget);
    } catch (const json::exception& e) {
        config_error(std::string("malformed sweep block: ") + e.what());
    }
    return plan;
}

json to_json(const SweepPlan& plan) {
    json axes = json::array();
    for (const auto& ax : plan.axes) {
        axes.push_back({{"field", to_string(ax.field)},
                        {"start", ax.start},
                        {"stop", ax.stop},
                        {"count", ax.count},
                        {"scale", ax.scale == AxisScale::Linear ? "linear" : "log"}});
    }
    json outputs = json::array();
    for (auto o : plan.outputs) outputs.push_back(to_string(o));
    json doc = to_json(plan.base);
    doc["branch"] = plan.branch ? json(to_string(*plan.branch)) : json(nullptr);
    doc["metric_scale"] = plan.metric_scale ? json(*plan.metric_scale) : json(nullptr);
    doc["transparency_threshold"] = plan.transparency.threshold;
    doc["sweep"] = {{"axes", axes},
                    {"outputs", outputs},
                    {"grid", {{"start", plan.grid.start}, {"stop", plan.grid.stop}, {"count", plan.grid.count}}},
                    {"budget", plan.budget}};
    return doc;
}

std::string plan_hash(const SweepPlan& plan) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : to_json(plan).dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return hex64(h);
}

json to_json(const RunRecord& record, bool include_wall_time) {
    json points = json::array();
    for (const auto& pt : record.points) {
        json axes = json::object();
        for (std::size_t k = 0; k < pt.axis_values.size(); ++k) {
            axes[record.axis_names.at(k)] = pt.axis_values[k];
        }
        json e = {{"index", pt.index}, {"axes", axes}, {"errors", pt.errors}};
        e["steady"] = pt.steady ? steady_json(*pt.steady) : json(nullptr);
        e["spectrum"] = pt.spectrum ? spectrum_json(*pt.spectrum) : json(nullptr);
        e["transparency"] = pt.transparency ? transparency_json(*pt.transparency) : json(nullptr);
        e["group_metric"] = group_metric_json(pt.group_metric);
        points.push_back(std::move(e));
    }
    json doc = {{"plan_hash", record.plan_hash},
                {"code_version", record.code_version},
                {"axes", record.axis_names},
                {"points", points}};
    if (include_wall_time) doc["wall_time_s"] = record.wall_time_s;
    return doc;
}

DiffReport diff_records(const json& a, const json& b, double rel_tol) {
    DiffReport report;
    diff_walk(a, b, "", rel_tol, report);
    return report;
}

DiffReport diff_records(const RunRecord& a, const RunRecord& b, double rel_tol) {
    return diff_records(to_json(a, false), to_json(b, false), rel_tol);
}

} // namespace omsim
