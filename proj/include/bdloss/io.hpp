#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "bdloss/decomp.hpp"
#include "bdloss/model.hpp"
#include "bdloss/setfn.hpp"
#include "bdloss/trainer.hpp"

namespace bdloss {

using json = nlohmann::json;

// {"p", "repr": "dense"|"symmetric"|"fpfn", "values", "m"}; fpfn files may
// also carry "positives" (element indices), defaulting to 0..m-1.
json setfn_to_json(const SetFunction& f);
SetFunction setfn_from_json(const json& j);

json report_to_json(const StructureReport& r, int p);
json decomposition_to_json(const Decomposition& d, const DecompositionCheck& check);

json model_to_json(const LinearModel& m);
LinearModel model_from_json(const json& j);

void write_trace_csv(std::ostream& os, const TrainTrace& t);

// {"bag_id", "items": [{"x": [...], "y": +-1}, ...]}
json sample_to_json(const Sample& s);
Sample sample_from_json(const json& j);

void write_jsonl(std::ostream& os, const std::vector<Sample>& data);
// Throws std::invalid_argument naming the offending line.
std::vector<Sample> read_jsonl(std::istream& is, std::vector<std::string>* warnings = nullptr);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bdloss
