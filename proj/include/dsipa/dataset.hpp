#pragma once

#include <string>
#include <vector>

#include "dsipa/types.hpp"

namespace dsipa {

// Reads a JSONL dataset: one object per line with required fields "id" and
// "text", optional "label" ("human"|"llm", case-insensitive), "domain" and
// "source_model". Preserves file order. Throws std::runtime_error naming the
// offending line for malformed JSON, missing/empty fields or duplicate ids.
std::vector<TextSample> load_dataset(const std::string& path);

// Writes samples as JSONL; load_dataset(save_dataset(s)) round-trips.
void save_dataset(const std::string& path, const std::vector<TextSample>& samples);

// Verdict files: JSONL with sample_id, predicted, dx, threshold.
void save_verdicts(const std::string& path, const std::vector<Verdict>& verdicts);
std::vector<Verdict> load_verdicts(const std::string& path);

std::string verdict_to_json_line(const Verdict& verdict);

}  // namespace dsipa
