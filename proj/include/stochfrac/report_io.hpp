#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "stochfrac/diagnostics.hpp"
#include "stochfrac/experiment.hpp"
#include "stochfrac/fractional_kernel.hpp"

namespace stochfrac {

inline constexpr std::string_view kVersion = "0.1.0";

// Shortest round-trip decimal rendering; reruns produce identical bytes.
std::string format_double(double x);

std::uint64_t fnv1a64(std::string_view text);

// CSV files: comma separators, '.' decimal point, LF line endings, a column
// header row, and one leading '#' line carrying tool version, config hash
// and seed.
std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed);

void write_rate_report_csv(std::ostream& out, const RateReport& report);
std::string rate_report_table(const RateReport& report);  // paper-style layout

void write_kernel_csv(std::ostream& out, const WeightKernel& kernel, std::uint64_t seed);

void write_profile_csv(std::ostream& out, const LatticeFunction& u, std::uint64_t config_hash,
                       std::uint64_t seed);

void write_apriori_csv(std::ostream& out, const AprioriStudyResult& result,
                       std::uint64_t config_hash, std::uint64_t seed);
std::string apriori_text(const AprioriStudyResult& result);

// Flat key=value configuration files ('#' starts a comment). Returns the
// parsed pairs; duplicate keys keep the last occurrence.
std::map<std::string, std::string> parse_config_file(std::istream& in);

}  // namespace stochfrac
