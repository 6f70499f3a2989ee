#include "cutquad/version.hpp"

#ifndef CUTQUAD_REVISION
#define CUTQUAD_REVISION "unknown"
#endif

namespace cutquad {

std::string code_revision() { return CUTQUAD_REVISION; }

std::string version_string() { return std::string("cutquad 0.1.0 (revision ") + CUTQUAD_REVISION + ")"; }

}  // namespace cutquad
