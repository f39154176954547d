#pragma once

#include <json.hpp>

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace morrey {

enum class Verdict { ConsistentOnGrid, ViolatedAt, Inconclusive };

const char* to_string(Verdict v);

struct ConditionRecord {
    std::string id;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
    std::vector<std::vector<double>> equality_points;
    std::size_t equality_count = 0;
    // False for alternatives such as C3a whose failure alone decides nothing.
    bool required = true;
    bool satisfied = true;
    std::string note;

    static constexpr std::size_t kMaxStoredEqualityPoints = 2048;

    // Records one evaluation of the margin at a point.
    void observe(double margin, const std::vector<double>& point, bool is_equality);
};

struct Witness {
    std::string condition;
    std::vector<double> point;
    double margin = 0.0;
    std::string description;
};

struct ConvexityReport {
    std::string check;
    std::string energy_name;
    std::string h;
    std::string f;
    Verdict verdict = Verdict::ConsistentOnGrid;
    std::vector<ConditionRecord> conditions;
    std::vector<Witness> witnesses;
    std::vector<std::string> notes;
    nlohmann::json extra = nlohmann::json::object();

    const ConditionRecord* condition(const std::string& id) const;
    ConditionRecord* condition(const std::string& id);
};

nlohmann::json to_json(const ConditionRecord& c);
nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const ConvexityReport& r);

// Long-format CSV: one "pointer,value" row per scalar leaf of the document.
std::string to_csv(const nlohmann::json& doc);
// Inverse of to_csv for documents whose leaves are numbers, strings, booleans, or null.
nlohmann::json from_csv(const std::string& csv);

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

} // namespace morrey
