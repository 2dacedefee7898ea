#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bdpz/bounds.hpp"
#include "bdpz/model.hpp"
#include "bdpz/simulate.hpp"
#include "bdpz/solver.hpp"
#include "bdpz/weights.hpp"

namespace bdpz {

using Json = nlohmann::json;

/// Model config:
///   { "name": str, "horizon": int>=1, "birth": [band...], "death": [band...] }
///   band = { "lo": int|"-inf", "hi": int|"+inf", "base": num, "sin_amp": num,
///            "cos_amp": num, "freq": num,
///            "factor": {"kind": "one"|"min_linear"|"table", "cap": int,
///                       "entries": {"<int>": num}, "default": num} }
RateModel parse_model(const Json& doc);
RateModel parse_model(const std::string& text);
Json model_to_json(const RateModel& m);

/// Built-in name ("ex1", "ex2") or path to a model config file.
RateModel resolve_model(const std::string& name_or_path);

/// Weight config: { "head": {"1": num, "-1": num, ...}, "pos_ratio": num, "neg_ratio": num }.
WeightSequence parse_weights(const Json& doc);
WeightSequence parse_weights(const std::string& text);
Json weights_to_json(const WeightSequence& w);

/// Built-in weights "ex1", "ex1-star", "ex2", "ex2-star" or a file path.
WeightSequence resolve_weights(const std::string& name_or_path);

/// Numbers with 17 significant digits.
std::string format_number(double x);

/// { "kind": ..., "value": "<decimal string>", "inputs_digest": {...} }
Json report_to_json(const BoundReport& r);
Json envelope_to_json(const EnvelopeConstants& env);

/// `t,k,p`, one row per (time, state).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// `t,mean,variance,mass`.
void write_moments_csv(std::ostream& os, const Trajectory& traj);
/// `k,p_hat,stderr,n_paths,seed,t`.
void write_histogram_csv(std::ostream& os, const EmpiricalDistribution& h);

std::string read_file(const std::string& path);

}  // namespace bdpz
