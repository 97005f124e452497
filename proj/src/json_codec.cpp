#include "pkg/json_codec.hpp"

namespace pkg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& message) {
    throw ValidationError(field, message);
}

const json& member(const json& obj, const char* key, const std::string& field) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        bad(field.empty() ? key : field + "." + key, "required");
    }
    return *it;
}

std::string path(const std::string& field, const char* key) { return field.empty() ? key : field + "." + key; }

std::string string_of(const json& j, const std::string& field) {
    if (!j.is_string()) {
        bad(field, "expected a string");
    }
    return j.get<std::string>();
}

Iri iri_of(const json& j, const std::string& field) { return Iri{string_of(j, field)}; }

void require_object(const json& j, const std::string& field) {
    if (!j.is_object()) {
        bad(field.empty() ? "$" : field, "expected an object");
    }
}

std::set<Iri> iri_set(const json& j, const std::string& field) {
    if (!j.is_array()) {
        bad(field, "expected an array of IRIs");
    }
    std::set<Iri> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.insert(iri_of(j[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

json iri_array(const std::set<Iri>& set) {
    json out = json::array();
    for (const auto& iri : set) {
        out.push_back(iri.str());
    }
    return out;
}

} // namespace

json element_to_json(const SpoElement& element) {
    if (const auto* iri = std::get_if<Iri>(&element)) {
        return {{"iri", iri->str()}};
    }
    const auto& c = std::get<Concept>(element);
    json concept_json = {{"id", c.id.str()}, {"text", c.text}};
    for (const auto& [key, links] : {std::pair{"related", &c.related}, {"broader", &c.broader},
                                     {"narrower", &c.narrower}}) {
        if (!links->empty()) {
            concept_json[key] = iri_array(*links);
        }
    }
    return {{"concept", concept_json}};
}

json preference_to_json(const Preference& pref) {
    return {{"id", pref.id.str()},
            {"holder", pref.holder.str()},
            {"topic", element_to_json(pref.topic)},
            {"weight", pref.weight},
            {"derivedFrom", pref.derived_from.str()}};
}

json statement_to_json(const PkgStatement& stmt) {
    json provenance = {{"createdBy", stmt.provenance.created_by.str()},
                       {"createdOn", format_timestamp(stmt.provenance.created_on)}};
    if (stmt.provenance.derived_from) {
        provenance["derivedFrom"] = stmt.provenance.derived_from->str();
    }
    json out = {{"id", stmt.id.str()},
                {"annotation", stmt.annotation},
                {"subject", element_to_json(stmt.subject)},
                {"predicate", element_to_json(stmt.predicate)},
                {"object", element_to_json(stmt.object)},
                {"provenance", provenance},
                {"access", {{"read", iri_array(stmt.access.read)}, {"write", iri_array(stmt.access.write)}}}};
    if (stmt.preference) {
        out["preference"] = preference_to_json(*stmt.preference);
    }
    return out;
}

json annotation_to_json(const AnnotatedUtterance& a) {
    auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
    json out = {{"raw", a.raw},
                {"intent", std::string(to_string(a.intent))},
                {"subject", opt(a.subject_text)},
                {"predicate", opt(a.predicate_text)},
                {"object", opt(a.object_text)},
                {"polarity", a.preference_polarity ? json(*a.preference_polarity) : json(nullptr)},
                {"annotator", a.annotator_id},
                {"warnings", a.warnings}};
    if (a.failure_reason) {
        out["failureReason"] = *a.failure_reason;
    }
    return out;
}

json action_result_to_json(const ActionResult& r) {
    json result;
    if (const auto* id = std::get_if<Iri>(&r.result)) {
        result = {{"id", id->str()}};
    } else if (const auto* statements = std::get_if<std::vector<PkgStatement>>(&r.result)) {
        result = json::array();
        for (const auto& st : *statements) {
            result.push_back(statement_to_json(st));
        }
    } else {
        result = {{"deleted", std::get<std::size_t>(r.result)}};
    }
    return {{"intent", std::string(to_string(r.intent))}, {"query", r.query}, {"result", result}};
}

json violations_to_json(const std::vector<Violation>& violations) {
    json out = json::array();
    for (const auto& v : violations) {
        out.push_back({{"field", v.field}, {"message", v.message}});
    }
    return out;
}

SpoElement element_from_json(const json& j, const std::string& field) {
    require_object(j, field);
    bool has_iri = j.contains("iri");
    bool has_concept = j.contains("concept");
    if (has_iri == has_concept) {
        bad(field, "expected exactly one of 'iri' or 'concept'");
    }
    if (has_iri) {
        return iri_of(j["iri"], path(field, "iri"));
    }
    const auto& cj = j["concept"];
    auto cfield = path(field, "concept");
    require_object(cj, cfield);
    Concept c;
    c.id = iri_of(member(cj, "id", cfield), path(cfield, "id"));
    c.text = string_of(member(cj, "text", cfield), path(cfield, "text"));
    for (const auto& [key, links] : {std::pair{"related", &c.related}, {"broader", &c.broader},
                                     {"narrower", &c.narrower}}) {
        if (cj.contains(key)) {
            *links = iri_set(cj[key], path(cfield, key));
        }
    }
    return c;
}

Preference preference_from_json(const json& j, const std::string& field) {
    require_object(j, field);
    Preference p;
    p.id = iri_of(member(j, "id", field), path(field, "id"));
    p.holder = iri_of(member(j, "holder", field), path(field, "holder"));
    p.topic = element_from_json(member(j, "topic", field), path(field, "topic"));
    const auto& w = member(j, "weight", field);
    if (!w.is_number()) {
        bad(path(field, "weight"), "expected a number");
    }
    p.weight = w.get<double>();
    p.derived_from = iri_of(member(j, "derivedFrom", field), path(field, "derivedFrom"));
    return p;
}

AccessPolicy access_from_json(const json& j, const std::string& field) {
    require_object(j, field);
    AccessPolicy a;
    a.read = iri_set(member(j, "read", field), path(field, "read"));
    a.write = iri_set(member(j, "write", field), path(field, "write"));
    return a;
}

PkgStatement statement_from_json(const json& j) {
    require_object(j, "");
    PkgStatement st;
    st.id = iri_of(member(j, "id", ""), "id");
    st.annotation = string_of(member(j, "annotation", ""), "annotation");
    st.subject = element_from_json(member(j, "subject", ""), "subject");
    st.predicate = element_from_json(member(j, "predicate", ""), "predicate");
    st.object = element_from_json(member(j, "object", ""), "object");
    const auto& prov = member(j, "provenance", "");
    require_object(prov, "provenance");
    st.provenance.created_by = iri_of(member(prov, "createdBy", "provenance"), "provenance.createdBy");
    auto on = string_of(member(prov, "createdOn", "provenance"), "provenance.createdOn");
    auto ts = parse_timestamp(on);
    if (!ts) {
        bad("provenance.createdOn", "expected YYYY-MM-DDTHH:MM:SSZ");
    }
    st.provenance.created_on = *ts;
    if (prov.contains("derivedFrom")) {
        st.provenance.derived_from = iri_of(prov["derivedFrom"], "provenance.derivedFrom");
    }
    st.access = access_from_json(member(j, "access", ""), "access");
    if (j.contains("preference") && !j["preference"].is_null()) {
        st.preference = preference_from_json(j["preference"]);
    }
    return st;
}

} // namespace pkg
