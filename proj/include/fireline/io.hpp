#pragma once

#include <string>

#include "fireline/model.hpp"
#include "json.hpp"

namespace fireline {

using Json = nlohmann::ordered_json;

// Parses an instance document. Tabulated table paths are resolved against
// base_dir. Throws InputError on malformed documents.
Instance instance_from_json(const Json& doc, const std::string& base_dir = ".");
Json instance_to_json(const Instance& instance);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fireline
