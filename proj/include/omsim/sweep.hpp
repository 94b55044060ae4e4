#pragma once

// Batch parameter scans over pump power, Coulomb coupling and detuning with
// reproducible run records.

#include "omsim/config.hpp"
#include "omsim/group_index.hpp"
#include "omsim/model.hpp"
#include "omsim/response.hpp"
#include "omsim/steady_state.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace omsim {

enum class AxisField { PumpPower, CoulombLambda, DetuningValue };
enum class AxisScale { Linear, Log };
enum class SweepOutput { Spectrum, Transparency, GroupMetric };

std::string to_string(AxisField f);
std::string to_string(SweepOutput o);

struct Axis {
    AxisField field = AxisField::PumpPower;
    double start = 0.0; // SI / rad/s
    double stop = 0.0;
    std::size_t count = 1;
    AxisScale scale = AxisScale::Linear;

    std::vector<double> values() const;
};

struct SweepPlan {
    RawConfig base;
    std::vector<Axis> axes; // at most three; first axis varies slowest
    std::vector<SweepOutput> outputs;
    DeltaGrid grid;
    TransparencyOptions transparency;
    std::optional<Branch> branch;
    std::optional<double> metric_scale;
    std::size_t budget = 100'000;

    bool wants(SweepOutput o) const;
    std::size_t point_count() const;
};

struct PointResult {
    std::size_t index = 0;
    std::vector<double> axis_values;
    std::optional<SteadyState> steady;
    std::optional<Spectrum> spectrum;
    std::optional<TransparencyReport> transparency;
    std::vector<GroupMetricPoint> group_metric; // minus, plus
    std::vector<std::string> errors;
};

struct RunRecord {
    std::string plan_hash;
    std::string code_version;
    std::vector<std::string> axis_names;
    std::vector<PointResult> points;
    double wall_time_s = 0.0;
};

/// Runs every grid point in row-major order. Per-point failures are recorded
/// in the point; the result does not depend on the worker count.
/// Throws Error(BudgetExceeded) or Error(InvalidArgument) for a malformed plan.
RunRecord execute(const SweepPlan& plan, unsigned workers = 1);

/// Builds a plan from a config document with a "sweep" block:
///   "sweep": {"axes": [{"field": "pump_power", "start": 5e-4, "stop": 4e-3,
///                       "count": 4, "scale": "log"}],
///             "outputs": ["transparency", "group_metric"],
///             "grid": {"start": 0.9, "stop": 1.1, "count": 4001},
///             "budget": 100000}
/// Axis values use the units declared for the field.
SweepPlan plan_from_config(const json& doc);

json to_json(const SweepPlan& plan);
std::string plan_hash(const SweepPlan& plan);

/// Numeric content plus metadata; wall time only when requested.
json to_json(const RunRecord& record, bool include_wall_time = true);

struct DiffEntry {
    std::string path;
    json a;
    json b;
};

struct DiffReport {
    std::vector<DiffEntry> entries;
    bool empty() const { return entries.empty(); }
};

/// Field-wise comparison; numbers match when |a - b| <= rel_tol * max(|a|, |b|).
/// Wall time is ignored. Throws Error(ShapeMismatch) when the structures differ.
DiffReport diff_records(const json& a, const json& b, double rel_tol = 0.0);
DiffReport diff_records(const RunRecord& a, const RunRecord& b, double rel_tol = 0.0);

} // namespace omsim
