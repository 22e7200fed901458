#include "droneplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "droneplan/errors.hpp"

namespace droneplan {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string to_string(OrderingMode mode) {
    switch (mode) {
        case OrderingMode::exact: return "exact";
        case OrderingMode::heuristic: return "heuristic";
        case OrderingMode::as_given: return "as-given";
    }
    return "exact";
}

OrderingMode ordering_mode_from_string(const std::string& name) {
    if (name == "exact") return OrderingMode::exact;
    if (name == "heuristic") return OrderingMode::heuristic;
    if (name == "as-given") return OrderingMode::as_given;
    throw ValidationError("ordering must be one of \"exact\", \"heuristic\", \"as-given\" (got \"" +
                          name + "\")");
}

void validate_scenario(const Scenario& s) {
    validate_layout(s.layout);
    validate_model(s.model);
    if (!is_finite(s.start) || !is_finite(s.end))
        throw ValidationError("start/end must be finite");
    if (s.model.p > kMaxExponent)
        throw ValidationError("power loss exponent must lie in [2, 16]");
    if (!(s.lambda0 > 0.0) || !std::isfinite(s.lambda0))
        throw ValidationError("lambda0 must be positive and finite");
    if (!(s.step_size > 0.0) || !std::isfinite(s.step_size))
        throw ValidationError("step_size must be positive and finite");
    if (!(s.merge_threshold > 0.0) || !std::isfinite(s.merge_threshold))
        throw ValidationError("merge_threshold must be positive and finite");
    for (double t : s.target_lengths)
        if (!std::isfinite(t) || t <= 0.0)
            throw ValidationError("target_lengths entries must be positive and finite");
}

static Point2 parse_point(const json& node, const std::string& field) {
    if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number())
        throw ValidationError("field \"" + field + "\" must be a [x, y] number pair");
    return Point2{node[0].get<double>(), node[1].get<double>()};
}

static double parse_number(const json& node, const std::string& field) {
    if (!node.is_number()) throw ValidationError("field \"" + field + "\" must be a number");
    return node.get<double>();
}

Scenario parse_scenario_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number for the diagnostic.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ValidationError("scenario JSON parse error at line " + std::to_string(line) + ": " +
                              e.what());
    }
    if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");

    static const std::set<std::string> known = {
        "heads",           "start",          "end",      "p",        "lambda0",
        "step_size",       "merge_threshold", "target_lengths", "ordering", "seed"};
    for (const auto& item : doc.items())
        if (!known.count(item.key()))
            throw ValidationError("unknown scenario field \"" + item.key() + "\"");

    Scenario s;
    if (!doc.contains("heads") || !doc["heads"].is_array() || doc["heads"].empty())
        throw ValidationError("field \"heads\" must be a non-empty array of [x, y] pairs");
    for (std::size_t i = 0; i < doc["heads"].size(); ++i)
        s.layout.heads.push_back(parse_point(doc["heads"][i], "heads[" + std::to_string(i) + "]"));

    if (!doc.contains("start")) throw ValidationError("field \"start\" is required");
    s.start = parse_point(doc["start"], "start");
    s.end = doc.contains("end") ? parse_point(doc["end"], "end") : s.start;

    if (doc.contains("p")) s.model.p = parse_number(doc["p"], "p");
    if (doc.contains("lambda0")) s.lambda0 = parse_number(doc["lambda0"], "lambda0");
    if (doc.contains("step_size")) s.step_size = parse_number(doc["step_size"], "step_size");
    if (doc.contains("merge_threshold"))
        s.merge_threshold = parse_number(doc["merge_threshold"], "merge_threshold");
    if (doc.contains("target_lengths")) {
        if (!doc["target_lengths"].is_array())
            throw ValidationError("field \"target_lengths\" must be an array of numbers");
        for (std::size_t i = 0; i < doc["target_lengths"].size(); ++i)
            s.target_lengths.push_back(parse_number(
                doc["target_lengths"][i], "target_lengths[" + std::to_string(i) + "]"));
    }
    if (doc.contains("ordering")) {
        if (!doc["ordering"].is_string())
            throw ValidationError("field \"ordering\" must be a string");
        s.ordering = ordering_mode_from_string(doc["ordering"].get<std::string>());
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw ValidationError("field \"seed\" must be a non-negative integer");
        s.seed = doc["seed"].get<std::uint64_t>();
    }

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    ordered_json doc;
    doc["heads"] = json::array();
    for (const Point2& h : s.layout.heads) doc["heads"].push_back({h.x, h.y});
    doc["start"] = {s.start.x, s.start.y};
    doc["end"] = {s.end.x, s.end.y};
    doc["p"] = s.model.p;
    doc["lambda0"] = s.lambda0;
    doc["step_size"] = s.step_size;
    doc["merge_threshold"] = s.merge_threshold;
    doc["target_lengths"] = s.target_lengths;
    doc["ordering"] = to_string(s.ordering);
    doc["seed"] = s.seed;
    return doc.dump(2) + "\n";
}

}  // namespace droneplan
