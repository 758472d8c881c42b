#pragma once

#include <string>
#include <vector>

#include "core/direct.hpp"
#include "core/splitting.hpp"
#include "core/web.hpp"

namespace coalflow {

// Shortest round-trip decimal form (std::to_chars); "inf" for infinities.
std::string format_double(double v);

inline constexpr const char* kCsvSchemaLine = "# coalflow-schema v1";

std::string render_path_record_csv(const PathRecord& record);
std::string render_merge_events_csv(const std::vector<MergeEvent>& events);
std::string render_split_record_csv(const SplitPathRecord& record);
std::string render_meeting_samples_csv(const std::vector<MeetingSample>& samples);
std::string render_cluster_estimates_csv(const std::vector<ClusterEstimate>& rows);
std::string render_sandwich_record_csv(const SandwichRecord& record);

}  // namespace coalflow
