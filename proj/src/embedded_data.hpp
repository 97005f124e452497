#pragma once

#include <string_view>

// Contents of data/, compiled in by cmake/EmbedData.cmake.
namespace pkg::data {
extern const std::string_view relations_tsv;
extern const std::string_view prompt_intent;
extern const std::string_view prompt_spo;
extern const std::string_view prompt_preference;
} // namespace pkg::data
