#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "satvec/bundle.hpp"
#include "satvec/pipeline.hpp"
#include "satvec/schedule.hpp"
#include "satvec/wire.hpp"

namespace satvec {

struct EntryRecord {
  std::uint32_t entry_index = 0;
  std::size_t worker_id = 0;
  double decode_seconds = 0.0;
  double pipeline_seconds = 0.0;
  std::size_t polygon_count = 0;
};

struct EntryFailure {
  std::uint32_t entry_index = 0;
  std::string reason;
};

struct JobReport {
  double total_wall_seconds = 0.0;
  /// Sorted by entry index.
  std::vector<EntryRecord> per_entry;
  std::vector<EntryFailure> failures;

  std::size_t entries_processed() const noexcept { return per_entry.size(); }
  std::size_t entries_failed() const noexcept { return failures.size(); }
};

/// A map-only job: one output per culled entry, no aggregation.
struct JobSpec {
  std::filesystem::path bundle_path;
  std::filesystem::path output_dir;
  PipelineConfig cfg;
  /// Scale area thresholds per entry with scaled_for_image().
  bool auto_scale_areas = false;
  /// Local pool size; ignored when remote_endpoints is non-empty.
  std::size_t workers = 1;
  std::vector<Endpoint> remote_endpoints;
  CullPredicate cull;
  bool emit_render = false;
  SchedulePolicy policy = SchedulePolicy::dynamic_pull;
  /// How long to keep retrying an endpoint before declaring it unreachable.
  std::chrono::milliseconds connect_timeout{5000};
  /// Called on the coordinator thread after each entry's files are written.
  std::function<void(const EntryRecord&)> on_entry_done;
};

std::string output_geojson_name(std::uint32_t entry_index);
std::string output_render_name(std::uint32_t entry_index);

/// Throws Error(bundle_unreadable), Error(worker_unreachable) or
/// Error(io) when the output directory cannot be written. Per-entry
/// failures are reported, not thrown.
JobReport run_job(const JobSpec& spec);

}  // namespace satvec
