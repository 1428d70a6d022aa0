#include "satvec/schedule.hpp"

#include <stdexcept>
#include <thread>

namespace satvec {

TaskQueue::TaskQueue(std::span<const std::uint32_t> entries) : pending_(entries.begin(), entries.end()) {}

std::optional<std::uint32_t> TaskQueue::pull() {
  std::lock_guard lock(mu_);
  if (pending_.empty()) return std::nullopt;
  const auto entry = *pending_.begin();
  pending_.erase(pending_.begin());
  ++in_flight_;
  return entry;
}

std::optional<std::uint32_t> TaskQueue::wait_pull() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !pending_.empty() || in_flight_ == 0; });
  if (pending_.empty()) return std::nullopt;
  const auto entry = *pending_.begin();
  pending_.erase(pending_.begin());
  ++in_flight_;
  return entry;
}

void TaskQueue::complete(std::uint32_t) {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_all();
}

void TaskQueue::requeue(std::uint32_t entry) {
  {
    std::lock_guard lock(mu_);
    pending_.insert(entry);
    --in_flight_;
  }
  cv_.notify_all();
}

std::size_t TaskQueue::pending() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

std::size_t TaskQueue::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

std::vector<std::vector<std::uint32_t>> round_robin_plan(std::span<const std::uint32_t> entries,
                                                         std::size_t workers) {
  if (workers == 0) throw std::invalid_argument("round_robin_plan: workers must be >= 1");
  std::vector<std::vector<std::uint32_t>> plan(workers);
  for (std::size_t k = 0; k < entries.size(); ++k) plan[k % workers].push_back(entries[k]);
  return plan;
}

std::vector<Assignment> schedule(std::span<const std::uint32_t> entries, std::size_t workers,
                                 SchedulePolicy policy,
                                 const std::function<void(std::size_t, std::uint32_t)>& work) {
  if (workers == 0) throw std::invalid_argument("schedule: workers must be >= 1");

  std::mutex log_mu;
  std::vector<Assignment> log;
  auto record = [&](std::size_t w, std::uint32_t e) {
    work(w, e);
    std::lock_guard lock(log_mu);
    log.push_back({w, e});
  };

  TaskQueue queue(entries);
  const auto plan = policy == SchedulePolicy::round_robin ? round_robin_plan(entries, workers)
                                                          : std::vector<std::vector<std::uint32_t>>{};
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        if (policy == SchedulePolicy::round_robin) {
          for (auto e : plan[w]) record(w, e);
        } else {
          while (auto e = queue.pull()) {
            record(w, *e);
            queue.complete(*e);
          }
        }
      });
    }
  }
  return log;
}

}  // namespace satvec
