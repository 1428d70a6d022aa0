#include "satvec/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "satvec/codec.hpp"
#include "satvec/error.hpp"
#include "satvec/vector.hpp"

namespace satvec {

std::string output_geojson_name(std::uint32_t entry_index) {
  return "entry_" + std::to_string(entry_index) + ".geojson";
}

std::string output_render_name(std::uint32_t entry_index) {
  return "entry_" + std::to_string(entry_index) + ".png";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  std::uint32_t entry = 0;
  std::size_t worker = 0;
  double decode_seconds = 0.0;
  double pipeline_seconds = 0.0;
  std::size_t polygon_count = 0;
  std::optional<std::string> error;
  std::string geojson;
  std::vector<std::uint8_t> render;
};

/// Worker -> coordinator channel.
class OutcomeChannel {
public:
  void push(Outcome o) {
    {
      std::lock_guard lock(mu_);
      items_.push_back(std::move(o));
    }
    cv_.notify_one();
  }

  Outcome pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !items_.empty(); });
    Outcome o = std::move(items_.front());
    items_.pop_front();
    return o;
  }

private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Outcome> items_;
};

std::vector<std::uint8_t> render_png(const VectorScene& scene) {
  const BinaryImage mask = rasterize(scene);
  GrayImage gray(scene.width, scene.height);
  auto dst = gray.data();
  auto src = mask.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] ? 255 : 0;
  return encode_png(gray);
}

/// Shared by local and remote paths so both produce identical bytes.
void finish_scene(Outcome& o, const VectorScene& scene, bool emit_render) {
  o.polygon_count = scene.polygons.size();
  o.geojson = to_geojson(scene);
  if (emit_render) o.render = render_png(scene);
}

PipelineConfig config_for(const JobSpec& spec, const BundleEntryHeader& h) {
  return spec.auto_scale_areas ? scaled_for_image(spec.cfg, h.width, h.height) : spec.cfg;
}

Outcome process_locally(const JobSpec& spec, const ImageBundle& bundle, std::uint32_t entry, std::size_t worker) {
  Outcome o;
  o.entry = entry;
  o.worker = worker;
  try {
    const auto& h = bundle.header(entry);
    auto t = Clock::now();
    const RgbImage img = decode_image(bundle.payload(entry), h.format);
    o.decode_seconds = seconds_since(t);
    t = Clock::now();
    const VectorScene scene = vectorize_image(img, config_for(spec, h), h.name);
    o.pipeline_seconds = seconds_since(t);
    finish_scene(o, scene, spec.emit_render);
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(Errc::io, path.string() + ": write failed");
}

/// One coordinator-side connection to a remote worker.
class RemoteLeg {
public:
  RemoteLeg(std::size_t id, Endpoint ep, Socket sock) : id_(id), ep_(std::move(ep)), sock_(std::move(sock)) {}

  // Pulls entries until the queue drains. On connection loss the in-flight
  // entry goes back to the queue and this leg retires.
  void run(const JobSpec& spec, const ImageBundle& bundle, TaskQueue& queue, OutcomeChannel& out,
           std::atomic<std::size_t>& live) {
    while (auto entry = queue.wait_pull()) {
      const auto& h = bundle.header(*entry);
      TaskMessage task;
      task.entry_index = *entry;
      task.format_code = static_cast<std::uint16_t>(h.format);
      task.cfg = config_for(spec, h);
      const auto payload = bundle.payload(*entry);
      task.image.assign(payload.begin(), payload.end());

      std::optional<ResultMessage> result;
      try {
        write_frame(sock_, encode_task(task));
        auto frame = read_frame(sock_);
        if (frame && frame->type == MsgType::result) result = decode_result(frame->payload);
      } catch (const Error&) {
      }
      if (!result || result->entry_index != *entry) {
        queue.requeue(*entry);
        sock_.close();
        if (live.fetch_sub(1) == 1) fail_remaining(queue, out);
        return;
      }

      Outcome o;
      o.entry = *entry;
      o.worker = id_;
      o.pipeline_seconds = result->pipeline_seconds;
      if (result->status == ResultStatus::ok) {
        try {
          VectorScene scene = from_geojson(result->body);
          scene.source_name = h.name;
          finish_scene(o, scene, spec.emit_render);
        } catch (const std::exception& e) {
          o.error = std::string("worker returned invalid GeoJSON: ") + e.what();
        }
      } else {
        o.error = result->body;
      }
      out.push(std::move(o));
      queue.complete(*entry);
    }
    try {
      write_frame(sock_, encode_shutdown());
    } catch (const Error&) {
    }
  }

private:
  // Last live leg: nobody is left to run what remains.
  void fail_remaining(TaskQueue& queue, OutcomeChannel& out) {
    while (auto entry = queue.pull()) {
      Outcome o;
      o.entry = *entry;
      o.worker = id_;
      o.error = "no live workers remain (last lost: " + ep_.to_string() + ")";
      out.push(std::move(o));
      queue.complete(*entry);
    }
  }

  std::size_t id_;
  Endpoint ep_;
  Socket sock_;
};

}  // namespace

JobReport run_job(const JobSpec& spec) {
  const auto start = Clock::now();
  validate(spec.cfg);
  if (spec.remote_endpoints.empty() && spec.workers == 0) {
    throw Error(Errc::schema_violation, "workers must be >= 1");
  }

  std::optional<ImageBundle> opened;
  try {
    opened = ImageBundle::open_file(spec.bundle_path);
  } catch (const Error& e) {
    if (e.code() == Errc::bundle_unreadable) throw;
    throw Error(Errc::bundle_unreadable, spec.bundle_path.string() + ": " + e.what());
  }
  const ImageBundle& bundle = *opened;
  const std::vector<std::uint32_t> entries = cull(bundle, spec.cull);

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw Error(Errc::io, spec.output_dir.string() + ": " + ec.message());

  // Connect every remote leg before any work starts; an endpoint that never
  // answers aborts the job.
  std::vector<RemoteLeg> legs;
  for (std::size_t i = 0; i < spec.remote_endpoints.size(); ++i) {
    const auto& ep = spec.remote_endpoints[i];
    legs.emplace_back(i, ep, connect_to(ep, spec.connect_timeout));
  }

  OutcomeChannel channel;
  TaskQueue queue(entries);
  std::atomic<std::size_t> live{legs.size()};
  std::vector<std::jthread> threads;

  if (!legs.empty()) {
    for (auto& leg : legs) {
      threads.emplace_back([&] { leg.run(spec, bundle, queue, channel, live); });
    }
  } else {
    threads.emplace_back([&] {
      schedule(entries, spec.workers, spec.policy, [&](std::size_t w, std::uint32_t e) {
        channel.push(process_locally(spec, bundle, e, w));
      });
    });
  }

  JobReport report;
  std::set<std::uint32_t> resolved;
  while (resolved.size() < entries.size()) {
    Outcome o = channel.pop();
    if (!resolved.insert(o.entry).second) continue;  // first result wins
    if (o.error) {
      report.failures.push_back({o.entry, *o.error});
      continue;
    }
    const auto geo = std::span(reinterpret_cast<const std::uint8_t*>(o.geojson.data()), o.geojson.size());
    write_file(spec.output_dir / output_geojson_name(o.entry), geo);
    if (spec.emit_render) write_file(spec.output_dir / output_render_name(o.entry), o.render);
    EntryRecord rec{o.entry, o.worker, o.decode_seconds, o.pipeline_seconds, o.polygon_count};
    report.per_entry.push_back(rec);
    if (spec.on_entry_done) spec.on_entry_done(rec);
  }
  threads.clear();
  report.total_wall_seconds = seconds_since(start);

  std::sort(report.per_entry.begin(), report.per_entry.end(),
            [](const auto& a, const auto& b) { return a.entry_index < b.entry_index; });
  std::sort(report.failures.begin(), report.failures.end(),
            [](const auto& a, const auto& b) { return a.entry_index < b.entry_index; });
  return report;
}

}  // namespace satvec
