#pragma once

#include <json.hpp>

namespace skm {

// Insertion-ordered JSON keeps every export byte-stable.
using Json = nlohmann::ordered_json;

}  // namespace skm
