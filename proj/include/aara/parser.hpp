#pragma once

#include "aara/syntax.hpp"

#include <string_view>

namespace aara {

// A single expression; free variables are left as written.
ExprPtr parse(std::string_view source);

// Definitions followed by an optional `main`.
Program parse_program(std::string_view source);

TypePtr parse_type(std::string_view source);

}  // namespace aara
