#pragma once

#include <cstddef>
#include <cstdint>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace satvec {

/// Pull queue handing out the lowest unclaimed entry first. Claimed entries
/// stay in flight until complete() or requeue(); a requeued entry is handed
/// out again.
class TaskQueue {
public:
  explicit TaskQueue(std::span<const std::uint32_t> entries);

  /// Non-blocking claim.
  std::optional<std::uint32_t> pull();
  /// Blocks while nothing is pending but some entry is still in flight
  /// (it may come back through requeue). nullopt once everything is done.
  std::optional<std::uint32_t> wait_pull();
  void complete(std::uint32_t entry);
  void requeue(std::uint32_t entry);

  std::size_t pending() const;
  std::size_t in_flight() const;

private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::set<std::uint32_t> pending_;
  std::size_t in_flight_ = 0;
};

enum class SchedulePolicy {
  /// Idle workers pull the lowest unclaimed index.
  dynamic_pull,
  /// Entry k goes to worker k % workers; used to force a fixed plan in tests.
  round_robin,
};

struct Assignment {
  std::size_t worker = 0;
  std::uint32_t entry = 0;
  bool operator==(const Assignment&) const = default;
};

/// Static plan for round_robin; for dynamic_pull the plan only exists after
/// execution, see schedule().
std::vector<std::vector<std::uint32_t>> round_robin_plan(std::span<const std::uint32_t> entries,
                                                         std::size_t workers);

/// Runs `work(worker, entry)` for every entry on `workers` threads and
/// returns the assignments in completion order. `work` must not throw.
/// Throws std::invalid_argument
/// if workers == 0.
std::vector<Assignment> schedule(std::span<const std::uint32_t> entries, std::size_t workers,
                                 SchedulePolicy policy,
                                 const std::function<void(std::size_t, std::uint32_t)>& work);

}  // namespace satvec
