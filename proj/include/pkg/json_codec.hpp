#pragma once

#include <json.hpp>

#include "pkg/connector.hpp"
#include "pkg/nl2pkg.hpp"
#include "pkg/vocabulary.hpp"

namespace pkg {

/// Wire schema version sent as X-Pkg-Schema-Version.
inline constexpr int kSchemaVersion = 1;

nlohmann::json element_to_json(const SpoElement& element);
nlohmann::json preference_to_json(const Preference& pref);
nlohmann::json statement_to_json(const PkgStatement& stmt);
nlohmann::json annotation_to_json(const AnnotatedUtterance& a);
nlohmann::json action_result_to_json(const ActionResult& r);
nlohmann::json violations_to_json(const std::vector<Violation>& violations);

/// Strict decoders. Shape problems throw ValidationError with the field path
/// ("subject.concept.text", "provenance.createdOn", ...); semantic checks are
/// left to validate_statement.
SpoElement element_from_json(const nlohmann::json& j, const std::string& field);
Preference preference_from_json(const nlohmann::json& j, const std::string& field = "preference");
PkgStatement statement_from_json(const nlohmann::json& j);
AccessPolicy access_from_json(const nlohmann::json& j, const std::string& field = "access");

} // namespace pkg
