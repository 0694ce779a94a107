#pragma once

#include <json.hpp>

namespace trapwave {

/// Insertion-ordered JSON, so serialized artifacts have a stable field order.
using Json = nlohmann::ordered_json;

}  // namespace trapwave
