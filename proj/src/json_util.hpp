#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

namespace cutquad::detail {

/// Parses JSON, turning parse errors into std::invalid_argument with a
/// "line L, column C" prefix.
inline nlohmann::json parse_json_with_lines(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw std::invalid_argument(fmt::format("line {}, column {}: {}", line, column, e.what()));
  }
}

}  // namespace cutquad::detail
