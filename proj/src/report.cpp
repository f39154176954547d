#include "morrey/report.hpp"

#include "morrey/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace morrey {

using nlohmann::json;

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::ConsistentOnGrid: return "ConsistentOnGrid";
    case Verdict::ViolatedAt: return "ViolatedAt";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

void ConditionRecord::observe(double margin, const std::vector<double>& point, bool is_equality)
{
    if (margin < min_margin || argmin.empty()) {
        min_margin = margin;
        argmin = point;
    }
    if (is_equality) {
        ++equality_count;
        if (equality_points.size() < kMaxStoredEqualityPoints)
            equality_points.push_back(point);
    }
}

const ConditionRecord* ConvexityReport::condition(const std::string& id) const
{
    for (const auto& c : conditions)
        if (c.id == id)
            return &c;
    return nullptr;
}

ConditionRecord* ConvexityReport::condition(const std::string& id)
{
    for (auto& c : conditions)
        if (c.id == id)
            return &c;
    return nullptr;
}

namespace {

json number_or_null(double x)
{
    if (std::isfinite(x))
        return x;
    return nullptr;
}

json vector_json(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v)
        a.push_back(number_or_null(x));
    return a;
}

} // namespace

json to_json(const ConditionRecord& c)
{
    json pts = json::array();
    for (const auto& p : c.equality_points)
        pts.push_back(vector_json(p));
    json j = {{"id", c.id},
              {"min_margin", number_or_null(c.min_margin)},
              {"argmin", vector_json(c.argmin)},
              {"equality_points", pts},
              {"equality_count", c.equality_count},
              {"required", c.required},
              {"satisfied", c.satisfied}};
    if (!c.note.empty())
        j["note"] = c.note;
    return j;
}

json to_json(const Witness& w)
{
    return {{"condition", w.condition},
            {"point", vector_json(w.point)},
            {"margin", number_or_null(w.margin)},
            {"description", w.description}};
}

json to_json(const ConvexityReport& r)
{
    json conditions = json::array();
    for (const auto& c : r.conditions)
        conditions.push_back(to_json(c));
    json witnesses = json::array();
    for (const auto& w : r.witnesses)
        witnesses.push_back(to_json(w));
    json j = {{"check", r.check},
              {"energy", {{"name", r.energy_name}, {"h", r.h}, {"f", r.f}}},
              {"verdict", to_string(r.verdict)},
              {"conditions", conditions},
              {"witnesses", witnesses},
              {"notes", r.notes}};
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it)
        j[it.key()] = it.value();
    return j;
}

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += "\"\"";
        else
            out += c;
    }
    out += '"';
    return out;
}

std::string csv_value(const json& v)
{
    if (v.is_string())
        return csv_quote(v.get<std::string>());
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_null())
        return "null";
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    if (v.is_number_unsigned())
        return std::to_string(v.get<unsigned long long>());
    if (v.is_number())
        return format_double(v.get<double>());
    return v.dump();  // only empty containers reach here
}

std::string escape_pointer_token(const std::string& key)
{
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

// Like json::flatten, but keeps empty arrays and objects as leaves.
void flatten_into(const json& v, const std::string& prefix, std::vector<std::pair<std::string, json>>& out)
{
    if (v.is_array() && !v.empty()) {
        for (std::size_t i = 0; i < v.size(); ++i)
            flatten_into(v[i], prefix + "/" + std::to_string(i), out);
    } else if (v.is_object() && !v.empty()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten_into(it.value(), prefix + "/" + escape_pointer_token(it.key()), out);
    } else {
        out.emplace_back(prefix, v);
    }
}

json parse_csv_value(const std::string& s)
{
    if (!s.empty() && s.front() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            out += s[i];
            if (s[i] == '"')
                ++i;
        }
        return out;
    }
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    if (s == "null")
        return nullptr;
    if (s == "[]")
        return json::array();
    if (s == "{}")
        return json::object();
    if (s.find_first_of(".eEn") == std::string::npos) {
        long long i = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), i);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size())
            return i;
    }
    double d = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
    if (res.ec != std::errc())
        throw Error(ErrorKind::InvalidArgument, "malformed CSV value '" + s + "'");
    return d;
}

} // namespace

std::string to_csv(const json& doc)
{
    std::ostringstream os;
    os << "pointer,value\n";
    std::vector<std::pair<std::string, json>> flat;
    flatten_into(doc, "", flat);
    for (const auto& [pointer, value] : flat)
        os << pointer << ',' << csv_value(value) << '\n';
    return os.str();
}

json from_csv(const std::string& csv)
{
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    if (line != "pointer,value")
        throw Error(ErrorKind::InvalidArgument, "CSV header must be 'pointer,value'");
    json doc;
    std::string pending;
    while (std::getline(is, line)) {
        // Quoted values may contain newlines; keep reading until quotes balance.
        pending = pending.empty() ? line : pending + "\n" + line;
        std::size_t quotes = 0;
        for (char c : pending)
            quotes += c == '"';
        if (quotes % 2 != 0)
            continue;
        const std::size_t comma = pending.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorKind::InvalidArgument, "malformed CSV row");
        doc[json::json_pointer(pending.substr(0, comma))] = parse_csv_value(pending.substr(comma + 1));
        pending.clear();
    }
    return doc;
}

} // namespace morrey
