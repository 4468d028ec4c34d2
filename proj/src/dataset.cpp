#include "dsipa/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace dsipa {

namespace {

using nlohmann::json;

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string trimmed(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<TextSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path);
    }
    std::vector<TextSample> samples;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_line(path, line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) fail_line(path, line_no, "line is not a JSON object");
        if (!obj.contains("id") || !obj["id"].is_string()) {
            fail_line(path, line_no, "missing string field \"id\"");
        }
        if (!obj.contains("text") || !obj["text"].is_string()) {
            fail_line(path, line_no, "missing string field \"text\"");
        }
        TextSample sample;
        sample.id = obj["id"].get<std::string>();
        sample.text = obj["text"].get<std::string>();
        if (trimmed(sample.text).empty()) {
            fail_line(path, line_no, "text is empty after trimming");
        }
        if (!seen_ids.insert(sample.id).second) {
            fail_line(path, line_no, "duplicate sample id \"" + sample.id + "\"");
        }
        if (obj.contains("label") && !obj["label"].is_null()) {
            try {
                sample.label = label_from_string(obj["label"].get<std::string>());
            } catch (const std::exception& e) {
                fail_line(path, line_no, e.what());
            }
        }
        if (obj.contains("domain") && !obj["domain"].is_null()) {
            sample.domain = obj["domain"].get<std::string>();
        }
        if (obj.contains("source_model") && !obj["source_model"].is_null()) {
            sample.source_model = obj["source_model"].get<std::string>();
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

void save_dataset(const std::string& path, const std::vector<TextSample>& samples) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path);
    }
    for (const TextSample& sample : samples) {
        json obj;
        obj["id"] = sample.id;
        obj["text"] = sample.text;
        if (sample.label) obj["label"] = to_string(*sample.label);
        if (sample.domain) obj["domain"] = *sample.domain;
        if (sample.source_model) obj["source_model"] = *sample.source_model;
        out << obj.dump() << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing dataset file: " + path);
    }
}

std::string verdict_to_json_line(const Verdict& verdict) {
    json obj;
    obj["sample_id"] = verdict.sample_id;
    obj["predicted"] = to_string(verdict.predicted);
    obj["dx"] = verdict.dx;
    obj["threshold"] = verdict.threshold;
    return obj.dump();
}

void save_verdicts(const std::string& path, const std::vector<Verdict>& verdicts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path);
    }
    for (const Verdict& verdict : verdicts) {
        out << verdict_to_json_line(verdict) << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing verdict file: " + path);
    }
}

std::vector<Verdict> load_verdicts(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open verdict file: " + path);
    }
    std::vector<Verdict> verdicts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_line(path, line_no, std::string("malformed JSON: ") + e.what());
        }
        Verdict verdict;
        verdict.sample_id = obj.at("sample_id").get<std::string>();
        verdict.predicted = label_from_string(obj.at("predicted").get<std::string>());
        verdict.dx = obj.at("dx").get<double>();
        verdict.threshold = obj.at("threshold").get<double>();
        verdicts.push_back(std::move(verdict));
    }
    return verdicts;
}

}  // namespace dsipa
