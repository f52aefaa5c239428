#pragma once

namespace fairthresh {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kPolicyFormat = "fairthresh-policy/1";
inline constexpr const char* kReportFormat = "fairthresh-report/1";

}  // namespace fairthresh
