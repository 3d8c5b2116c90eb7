#pragma once

namespace termstruct {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "termstruct.report/1";

}  // namespace termstruct
