#pragma once

#include <string>

namespace cutquad {

/// Git revision captured at configure time ("unknown" outside a checkout).
std::string code_revision();

std::string version_string();

}  // namespace cutquad
