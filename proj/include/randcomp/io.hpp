#pragma once

// File formats: network spec JSON, conditional-distribution CSV, and the
// 17-significant-digit number formatting shared by every CSV writer.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "randcomp/netmodel.hpp"

namespace randcomp::io {

/// "%.17g" rendering used for every CSV probability.
std::string format_real(double v);

NetworkSpec network_from_json(const nlohmann::json& doc);
nlohmann::json network_to_json(const ValidatedNetwork& net);

ValidatedNetwork read_network_file(const std::filesystem::path& path);
void write_network_file(const std::filesystem::path& path, const ValidatedNetwork& net);

/// Header `x,a,p`; rows ascending in (x, a).
void write_distribution_csv(std::ostream& out, const ConditionalDistribution& dist);
void write_distribution_csv(const std::filesystem::path& path, const ConditionalDistribution& dist);

/// Reads the format written above. Shape is inferred from the largest x and
/// a; every (x, a) cell must be present exactly once.
ConditionalDistribution read_distribution_csv(std::istream& in);
ConditionalDistribution read_distribution_csv(const std::filesystem::path& path);

/// Writes `doc` pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace randcomp::io
