#pragma once

#include <string>

#include "mufor/forest.h"

namespace mufor {

// Canonical JSON document: fixed key order, shortest round-trip doubles, no
// whitespace. Equal models serialize to equal bytes.
std::string serialize_model(const MultiForestModel& model);
MultiForestModel deserialize_model(const std::string& text);

void save_model(const MultiForestModel& model, const std::string& path);
MultiForestModel load_model(const std::string& path);

}  // namespace mufor
