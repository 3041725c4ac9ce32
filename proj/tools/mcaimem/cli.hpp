#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mcaimem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (without argv[0]). Every command writes its
/// outputs plus manifest.json into --out; `replay --manifest` re-executes a
/// manifest into a new --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "250", "250ns", "12.57us", "1ms", "2s" -> integer nanoseconds.
std::int64_t parse_duration_ns(std::string_view text);

}  // namespace mcaimem::cli
