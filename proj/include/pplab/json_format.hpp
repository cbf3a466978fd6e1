#pragma once

#include <json.hpp>
#include <string>

namespace pplab {

// Deterministic JSON text: object keys sorted, floats printed with 17 significant digits,
// non-finite floats as the strings "inf", "-inf", "nan".
std::string dump_json(const nlohmann::json& j, int indent = 2);

std::string format_double(double v, int digits = 17);

}  // namespace pplab
