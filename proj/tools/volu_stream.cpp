// volu-stream: scenario runner and content tooling.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "volu/errors.hpp"
#include "volu/manifest_io.hpp"
#include "volu/media_model.hpp"
#include "volu/scenario.hpp"
#include "volu/simulation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;

struct RunOptions {
  std::string scenario;
  std::optional<std::string> algorithm;
  std::optional<std::string> network;
  std::optional<std::string> camera;
  std::optional<int> depth;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<std::string> out;
  bool trace = false;
};

struct PackOptions {
  int depth = 2;
  double duration = 2.0;
  std::vector<double> ladder = volu::default_ladder_bps();
  std::string out = "packed";
};

volu::Scenario build_scenario(const RunOptions& opt) {
  volu::Scenario sc = volu::load_scenario(opt.scenario);
  const fs::path cwd = fs::current_path();
  if (opt.algorithm) sc.cbm.algorithm = volu::parse_algorithm(*opt.algorithm);
  if (opt.network) {
    sc.network_name = *opt.network;
    sc.network = volu::resolve_network(*opt.network, cwd);
  }
  if (opt.camera) {
    if (opt.camera->rfind("trace:", 0) == 0) {
      sc.camera.kind = volu::CameraKind::kTrace;
      sc.camera.trace = volu::read_viewpoint_trace(opt.camera->substr(6));
    } else {
      sc.camera.kind = volu::parse_camera_kind(*opt.camera);
    }
  }
  if (opt.depth) sc.tile_depth = *opt.depth;
  if (opt.seed) sc.seed = *opt.seed;
  if (opt.duration) sc.duration = *opt.duration;
  if (opt.out) sc.output_dir = *opt.out;
  if (opt.trace) sc.record_optimizer_trace = true;
  sc.network.seed = sc.seed;
  sc.validate();
  return sc;
}

int cmd_run(const RunOptions& opt) {
  volu::Scenario sc;
  try {
    sc = build_scenario(opt);
  } catch (const volu::ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kExitValidation;
  } catch (const volu::ConfigError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kExitValidation;
  }
  const volu::RunResult result = volu::run(sc);
  volu::write_outputs(result, sc.output_dir);
  const auto& s = result.summary;
  std::printf("%s: avg bandwidth %.3f Mbps, stalls %zu (%.2f s), delivered utility %.4g\n",
              s.algorithm.c_str(), s.avg_selected_bandwidth / 1e6, s.stall_count,
              s.stall_seconds, s.total_delivered_utility);
  std::printf("outputs written to %s\n", sc.output_dir.string().c_str());
  return 0;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw volu::ConfigError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

int cmd_pack(const PackOptions& opt) {
  volu::ObjectManifest manifest = volu::make_default_manifest(opt.depth, opt.ladder);
  manifest.duration = opt.duration;
  manifest.validate();
  const volu::SyntheticObject object(manifest, volu::ShellSpec{});
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  volu::save_manifest(dir / "manifest.json", manifest);
  for (int seg = 0; seg < object.segment_count(); ++seg) {
    const int number = manifest.start_number + seg;
    write_bytes(dir / ("segment_" + std::to_string(number) + ".idx"),
                object.index_bytes(seg));
    for (int m = 1; m <= manifest.representation_count(); ++m) {
      write_bytes(dir / manifest.media_name(m, number), object.payload(seg, m));
    }
  }
  std::printf("packed %d segments x %d representations, %zu occupied tiles per GOF, into %s\n",
              object.segment_count(), manifest.representation_count(),
              object.occupancy().size(), dir.string().c_str());
  return 0;
}

int cmd_inspect(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << file << '\n';
    return 1;
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  const volu::SegmentIndex index = volu::parse_index(bytes);
  std::printf("segment index: %zu bytes, %u representations, %zu GOFs\n",
              bytes.size(), index.representation_count, index.gof_count());
  for (std::size_t g = 0; g < index.gofs.size(); ++g) {
    const auto& gof = index.gofs[g];
    std::printf("GOF %zu: start %u, duration %u, frames %u, tiles %zu\n", g,
                gof.start_time, gof.duration, gof.frame_count, gof.tile_count());
    for (std::size_t m = 0; m < gof.per_representation.size(); ++m) {
      std::printf("  rep %zu: offset %u, header %u bytes\n", m + 1,
                  gof.per_representation[m].gof_byte_offset,
                  gof.per_representation[m].gof_header_byte_count);
    }
    for (const auto& tile : gof.tiles) {
      const volu::TileCoord c = volu::morton_decode(tile.morton_code);
      std::printf("  tile %u (%u,%u,%u) normal %u bytes", tile.morton_code, c.x, c.y,
                  c.z, tile.normal_code);
      for (auto b : tile.byte_count) std::printf(" %u", b);
      std::printf("\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Window-based volumetric streaming simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "simulate a streaming session");
  run_cmd->add_option("--scenario", run.scenario, "scenario JSON file")->required();
  run_cmd->add_option("--algorithm", run.algorithm, "wba | stripped-wba | tba | bba");
  run_cmd->add_option("--network", run.network, "stable | variable | trace:<file>");
  run_cmd->add_option("--camera", run.camera, "static | path1 | path2 | pan | trace:<file>");
  run_cmd->add_option("--depth", run.depth, "tile depth of synthetic objects");
  run_cmd->add_option("--seed", run.seed, "random seed");
  run_cmd->add_option("--duration", run.duration, "seconds of playback");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_flag("--optimizer-trace", run.trace, "also write optimizer_trace.csv");

  PackOptions pack;
  auto* pack_cmd = app.add_subcommand("pack", "write a synthetic object to disk");
  pack_cmd->add_option("--depth", pack.depth, "tile depth")->capture_default_str();
  pack_cmd->add_option("--duration", pack.duration, "media seconds")->capture_default_str();
  pack_cmd->add_option("--ladder", pack.ladder, "bandwidths in bits per second");
  pack_cmd->add_option("--out", pack.out, "output directory")->capture_default_str();

  std::string index_file;
  auto* inspect_cmd = app.add_subcommand("inspect-index", "dump a binary segment index");
  inspect_cmd->add_option("file", index_file, "index file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*pack_cmd) return cmd_pack(pack);
    if (*inspect_cmd) return cmd_inspect(index_file);
  } catch (const volu::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
