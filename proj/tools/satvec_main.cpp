// satvec: bundle management, single-image vectorization, map-only runs,
// remote worker mode and the scalability benchmark.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satvec/bench.hpp"
#include "satvec/bundle.hpp"
#include "satvec/codec.hpp"
#include "satvec/engine.hpp"
#include "satvec/error.hpp"
#include "satvec/pipeline.hpp"
#include "satvec/worker.hpp"

namespace fs = std::filesystem;
using namespace satvec;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, path.string() + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& target, std::string_view data) {
  if (target == "-") {
    std::cout << data << std::flush;
    return;
  }
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(Errc::io, target + ": write failed");
}

void write_output(const std::string& target, std::span<const std::uint8_t> data) {
  write_output(target, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

struct PipelineFlags {
  std::size_t min_area_pre = 300;
  std::size_t min_area_post = 10000;
  std::uint32_t se_size = 3;
  int connectivity = 8;
  bool auto_scale = false;

  PipelineConfig config() const {
    return PipelineConfig{min_area_pre, min_area_post, se_size, connectivity_from_int(connectivity)};
  }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--min-area-pre", f.min_area_pre, "Area opening threshold before morphology (px)")
      ->capture_default_str();
  cmd->add_option("--min-area-post", f.min_area_post, "Area opening threshold after hole filling (px)")
      ->capture_default_str();
  cmd->add_option("--se-size", f.se_size, "Side of the square structuring element (odd)")
      ->capture_default_str()
      ->check([](const std::string& s) -> std::string {
        const auto v = std::stoul(s);
        return (v % 2 == 1) ? std::string() : std::string("must be odd");
      });
  cmd->add_option("--connectivity", f.connectivity, "Foreground connectivity for area opening")
      ->capture_default_str()
      ->check(CLI::IsMember({4, 8}));
  cmd->add_flag("--auto-scale-areas", f.auto_scale,
                "Scale both area thresholds by image_area / 7000^2 (rounded up, at least 1)");
}

struct CullFlags {
  std::optional<std::uint32_t> min_width;
  std::optional<std::uint32_t> min_height;
  std::optional<std::uint64_t> min_pixels;
  std::optional<std::uint64_t> max_pixels;
  std::vector<std::string> formats;

  CullPredicate predicate() const {
    CullPredicate p{min_width, min_height, min_pixels, max_pixels, std::nullopt};
    if (!formats.empty()) {
      std::set<ImageFormat> allowed;
      for (const auto& name : formats) allowed.insert(*format_from_name(name));
      p.allowed_formats = std::move(allowed);
    }
    return p;
  }
};

void add_cull_flags(CLI::App* cmd, CullFlags& f) {
  cmd->add_option("--min-width", f.min_width, "Keep entries at least this wide");
  cmd->add_option("--min-height", f.min_height, "Keep entries at least this tall");
  cmd->add_option("--min-pixels", f.min_pixels, "Keep entries with at least this many pixels");
  cmd->add_option("--max-pixels", f.max_pixels, "Keep entries with at most this many pixels");
  cmd->add_option("--formats", f.formats, "Comma-separated formats to keep (png,jpeg,ppm,pgm)")
      ->delimiter(',')
      ->check(CLI::IsMember({"png", "jpeg", "jpg", "ppm", "pgm"}));
}

int cmd_bundle_create(const std::string& out_path, const std::vector<std::string>& inputs) {
  std::vector<BundleInput> items;
  for (const auto& p : inputs) items.push_back({fs::path(p).filename().string(), read_file(p)});
  write_output(out_path, bundle_create(items));
  std::cerr << "wrote " << items.size() << " entries to " << out_path << "\n";
  return exit_ok;
}

int cmd_bundle_list(const std::string& path) {
  const auto bundle = ImageBundle::open_file(path);
  for (std::size_t i = 0; i < bundle.entry_count(); ++i) {
    const auto& h = bundle.header(i);
    std::cout << i << '\t' << h.name << '\t' << h.width << 'x' << h.height << '\t' << format_name(h.format) << '\n';
  }
  return exit_ok;
}

int cmd_cull(const std::string& path, const CullFlags& flags) {
  const auto bundle = ImageBundle::open_file(path);
  for (auto i : cull(bundle, flags.predicate())) std::cout << i << '\n';
  return exit_ok;
}

int cmd_vectorize(const std::string& in, const std::string& out, const std::string& render,
                  const PipelineFlags& flags) {
  const auto bytes = read_file(in);
  const RgbImage img = decode_image(bytes);
  PipelineConfig cfg = flags.config();
  if (flags.auto_scale) cfg = scaled_for_image(cfg, img.width(), img.height());
  const VectorScene scene = vectorize_image(img, cfg, fs::path(in).filename().string());
  write_output(out, to_geojson(scene));
  if (!render.empty()) {
    const BinaryImage mask = rasterize(scene);
    GrayImage gray(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.pixel_count(); ++i) gray.data()[i] = mask.data()[i] ? 255 : 0;
    write_output(render, encode_png(gray));
  }
  std::cerr << in << ": threshold " << int(scene.threshold_used.level) << ", " << scene.polygons.size()
            << " polygons\n";
  return exit_ok;
}

int cmd_run(JobSpec spec, const std::vector<std::string>& endpoints, const CullFlags& cull_flags,
            const PipelineFlags& flags) {
  for (const auto& e : endpoints) spec.remote_endpoints.push_back(parse_endpoint(e));
  spec.cull = cull_flags.predicate();
  spec.cfg = flags.config();
  spec.auto_scale_areas = flags.auto_scale;
  const JobReport report = run_job(spec);
  std::cerr << "processed " << report.entries_processed() << ", failed " << report.entries_failed() << ", wall "
            << report.total_wall_seconds << " s\n";
  for (const auto& f : report.failures) std::cerr << "  entry " << f.entry_index << ": " << f.reason << "\n";
  return exit_ok;
}

int cmd_worker(const std::string& listen) {
  WorkerServer server(parse_endpoint(listen));
  std::cerr << "worker listening on port " << server.port() << "\n";
  server.serve();
  return exit_ok;
}

int cmd_bench(const BenchOptions& opts, const std::string& csv) {
  const auto rows = run_bench(opts, &std::cerr);
  write_output(csv, bench_csv(rows));
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raster-to-vector conversion over packed image bundles"};
  app.require_subcommand(1);

  std::string create_out;
  std::vector<std::string> create_inputs;
  auto* create = app.add_subcommand("bundle-create", "Pack images into a bundle file");
  create->add_option("-o,--out", create_out, "Output bundle file")->required();
  create->add_option("inputs", create_inputs, "PNG, JPEG, PPM or PGM files")->required();

  std::string list_path;
  auto* list = app.add_subcommand("bundle-list", "List bundle entries: index, name, WxH, format");
  list->add_option("bundle", list_path, "Bundle file")->required();

  std::string cull_path;
  CullFlags cull_flags;
  auto* cull_cmd = app.add_subcommand("cull", "Print indices of entries passing the filters");
  cull_cmd->add_option("bundle", cull_path, "Bundle file")->required();
  add_cull_flags(cull_cmd, cull_flags);

  std::string vec_in;
  std::string vec_out;
  std::string vec_render;
  PipelineFlags vec_flags;
  auto* vec = app.add_subcommand("vectorize", "Vectorize one image into GeoJSON");
  vec->add_option("-i,--in", vec_in, "Input image")->required();
  vec->add_option("-o,--out", vec_out, "Output GeoJSON ('-' for stdout)")->required();
  vec->add_option("--render", vec_render, "Also write the rasterized polygons as PNG");
  add_pipeline_flags(vec, vec_flags);

  JobSpec run_spec;
  std::string run_bundle;
  std::string run_out;
  std::size_t run_workers = 0;
  std::vector<std::string> run_endpoints;
  CullFlags run_cull;
  PipelineFlags run_flags;
  auto* run = app.add_subcommand("run", "Map-only job over a bundle, one GeoJSON per entry");
  run->add_option("--bundle", run_bundle, "Bundle file")->required();
  run->add_option("--out", run_out, "Output directory")->required();
  auto* workers_opt = run->add_option("--workers", run_workers, "Local worker threads")->check(CLI::PositiveNumber);
  auto* endpoints_opt =
      run->add_option("--endpoints", run_endpoints, "Remote workers host:port,...")->delimiter(',');
  workers_opt->excludes(endpoints_opt);
  run->add_flag("--emit-render", run_spec.emit_render, "Also write entry_<i>.png");
  add_cull_flags(run, run_cull);
  add_pipeline_flags(run, run_flags);

  std::string listen;
  auto* worker = app.add_subcommand("worker", "Serve vectorization tasks over TCP");
  worker->add_option("--listen", listen, "host:port to listen on")->required();

  BenchOptions bench_opts;
  std::string bench_csv_path;
  auto* bench = app.add_subcommand("bench", "Scalability benchmark over synthetic imagery");
  bench->add_option("--counts", bench_opts.counts, "Image counts, comma-separated")->delimiter(',')->required();
  bench->add_option("--size", bench_opts.image_size, "Image side in pixels")->required()->check(CLI::PositiveNumber);
  bench->add_option("--workers", bench_opts.worker_counts, "Worker counts, comma-separated")
      ->delimiter(',')
      ->required()
      ->check(CLI::PositiveNumber);
  bench->add_option("--reps", bench_opts.repetitions, "Repetitions per configuration")->required();
  bench->add_option("--csv", bench_csv_path, "CSV output ('-' for stdout)")->required();
  bench->add_option("--seed", bench_opts.seed, "Imagery seed")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*run && !*workers_opt && !*endpoints_opt) {
      throw CLI::RequiredError("run needs --workers N or --endpoints h1:p1,...");
    }
  } catch (const CLI::CallForHelp&) {
    std::cout << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return exit_usage;
  }

  try {
    if (*create) return cmd_bundle_create(create_out, create_inputs);
    if (*list) return cmd_bundle_list(list_path);
    if (*cull_cmd) return cmd_cull(cull_path, cull_flags);
    if (*vec) return cmd_vectorize(vec_in, vec_out, vec_render, vec_flags);
    if (*run) {
      run_spec.bundle_path = run_bundle;
      run_spec.output_dir = run_out;
      run_spec.workers = run_workers == 0 ? 1 : run_workers;
      return cmd_run(std::move(run_spec), run_endpoints, run_cull, run_flags);
    }
    if (*worker) return cmd_worker(listen);
    if (*bench) return cmd_bench(bench_opts, bench_csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_usage;
}
