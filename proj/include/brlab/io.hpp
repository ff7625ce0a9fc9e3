#pragma once

#include <json.hpp>
#include <string>
#include <variant>

#include "brlab/correlations.hpp"
#include "brlab/decomp.hpp"
#include "brlab/families.hpp"
#include "brlab/ranks.hpp"
#include "brlab/tree.hpp"

namespace brlab::io {

using nlohmann::json;

// Wsc: {"n": int, "weights": [{"subset": [1-based vertices], "w": int}]};
// omitted subsets default to weight 0, singletons to 1.
json wsc_to_json(const Wsc& omega);
Wsc wsc_from_json(const json& j);

// Action: {"generators": [[1-based image list]], "facet_maps": [[positions]]}.
json action_to_json(const GroupAction& action);
GroupAction action_from_json(const json& j, const Wsc& omega);

// Tensor file format: {"shape": [...], "re": [...], "im": [...]} row-major.
json tensor_to_json(const DenseTensor& t);
DenseTensor tensor_from_json(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

using AnyDecomposition = std::variant<UnconstrainedDecomposition, NonnegativeDecomposition,
                                      PsdDecomposition, SeparableDecomposition,
                                      PurificationDecomposition>;

json decomposition_to_json(const AnyDecomposition& dec);
AnyDecomposition decomposition_from_json(const json& j);

json hvm_to_json(const HiddenVariableModel& model);
HiddenVariableModel hvm_from_json(const json& j);

json povm_model_to_json(const QuantumPovmModel& model);
QuantumPovmModel povm_model_from_json(const json& j);

json channel_model_to_json(const QuantumChannelModel& model);
QuantumChannelModel channel_model_from_json(const json& j);

using AnyModel = std::variant<HiddenVariableModel, QuantumPovmModel, QuantumChannelModel>;
json model_to_json(const AnyModel& model);
AnyModel model_from_json(const json& j);

json study_to_json(const ConvergenceStudy& study);
/// CSV with header epsilon,error,included_in_fit; 17 significant digits,
/// '.' decimal point, LF line endings.
std::string study_to_csv(const ConvergenceStudy& study);

json rank_report_to_json(const RankReport& report);
json separation_to_json(const SeparationReport& report);
json closure_to_json(const ClosureReport& report);
json floors_to_json(const FloorMeasurement& floors);
FloorMeasurement floors_from_json(const json& j);

/// FNV-1a hash of the canonical (sorted-key) dump, as a hex string.
std::string config_hash(const json& config);

/// Adds {"config_hash", "version"} to an output object.
void stamp(json& out, const json& config);

std::string format_double(double v);  // %.17g

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace brlab::io
