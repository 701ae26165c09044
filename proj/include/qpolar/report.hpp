#pragma once

#include <cstdint>
#include <string>

namespace qpc {

/// Locale-independent formatting with 12 significant digits. All file output
/// flows through these so that identical runs produce identical bytes.
std::string fmt_real(double v);
std::string fmt_int(std::int64_t v);

}  // namespace qpc
