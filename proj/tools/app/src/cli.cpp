#include "dst_app/cli.hpp"

#include <glob.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

#include "dst/error.hpp"
#include "dst/imgio.hpp"
#include "dst/lut.hpp"
#include "dst/pipeline.hpp"
#include "dst/recipe_json.hpp"
#include "dst/spectral.hpp"
#include "dst_app/jobs.hpp"
#include "dst_app/service.hpp"

namespace dst::app {

namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  const Bytes b = read_file(path);
  return {b.begin(), b.end()};
}

LoadedImage load(const fs::path& path, std::ostream& err) {
  LoadedImage img = load_image(path);
  for (const auto& w : img.warnings) err << "dst: warning: " << path.string() << ": " << w << '\n';
  return img;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<fs::path> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) raise(ErrorKind::InvalidArgument, "cannot expand '" + pattern + "'");
  return out;
}

struct TransferArgs {
  std::string src, tgt, out, emit_lut, emit_recipe, config;
  std::string src_crop, tgt_crop;
  int orders_i = 4;
  int orders_chroma = 2;
  int lut_size = kDefaultLutSize;
  int bit_depth = 16;
  bool spectral = false;
  bool clamp = false;
  CLI::Option* orders_i_opt = nullptr;
  CLI::Option* orders_chroma_opt = nullptr;
  CLI::Option* spectral_opt = nullptr;
  CLI::Option* clamp_opt = nullptr;
};

struct OpticsArgs {
  std::string src, t, tprime, out, diff_crop, emit_kernel;
  int bit_depth = 16;
};

struct ApplyLutArgs {
  std::string lut, in, out;
  int bit_depth = 16;
};

struct BakeArgs {
  std::string recipe, out;
  int lut_size = kDefaultLutSize;
};

struct BatchArgs {
  std::string recipe, pattern, out_dir, suffix = "_styled";
  int bit_depth = 16;
};

struct ServeArgs {
  std::string bind = "127.0.0.1";
  int port = 0;
  double max_upload_mb = 64.0;
  unsigned workers = 0;
};

int run_transfer(const TransferArgs& a, std::ostream& out, std::ostream& err) {
  TransferConfig cfg = a.config.empty() ? TransferConfig{} : config_from_json(read_text(a.config));
  if (a.orders_i_opt->count()) cfg.orders[0] = a.orders_i;
  if (a.orders_chroma_opt->count()) cfg.orders[1] = cfg.orders[2] = a.orders_chroma;
  if (!a.src_crop.empty()) cfg.src_crop = parse_crop(a.src_crop);
  if (!a.tgt_crop.empty()) cfg.tgt_crop = parse_crop(a.tgt_crop);
  if (a.spectral_opt->count()) cfg.spectral = a.spectral;
  if (a.clamp_opt->count()) cfg.clamp = a.clamp ? ClampPolicy::Clamp : ClampPolicy::Preserve;

  const LoadedImage src = load(a.src, err);
  const LoadedImage tgt = load(a.tgt, err);
  const StyleTransfer r = transfer_style(src.image, tgt.image, cfg);

  if (!a.out.empty()) {
    save_image(r.image, a.out, a.bit_depth);
    out << "wrote " << a.out << '\n';
  }
  if (!a.emit_lut.empty()) {
    if (r.recipe.kernel) err << "dst: warning: the spectral kernel is spatial and is not baked into the LUT\n";
    write_file(a.emit_lut, cube_for_recipe(r.recipe, a.lut_size));
    out << "wrote " << a.emit_lut << '\n';
  }
  if (!a.emit_recipe.empty()) {
    write_file(a.emit_recipe, recipe_to_json(r.recipe, 2) + "\n");
    out << "wrote " << a.emit_recipe << '\n';
  }
  return kExitOk;
}

int run_optics(const OpticsArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<CropRect> crop;
  if (!a.diff_crop.empty()) crop = parse_crop(a.diff_crop);
  const LoadedImage src = load(a.src, err);
  const LoadedImage t = load(a.t, err);
  const LoadedImage tprime = load(a.tprime, err);
  const OpticsTransfer r = transfer_optics(src.image, t.image, tprime.image, crop);
  save_image(r.image, a.out, a.bit_depth);
  out << "wrote " << a.out << '\n';
  if (!a.emit_kernel.empty()) {
    write_file(a.emit_kernel, write_kernel_text(r.kernel.spatial(src.image.width, src.image.height)));
    out << "wrote " << a.emit_kernel << '\n';
  }
  return kExitOk;
}

int run_apply_lut(const ApplyLutArgs& a, std::ostream& out, std::ostream& err) {
  const CubeFile cube = read_cube(read_text(a.lut));
  for (int c = 0; c < 3; ++c) {
    if (cube.domain_min[c] != 0.0 || cube.domain_max[c] != 1.0) {
      raise(ErrorKind::InvalidArgument, a.lut + ": only the unit DOMAIN is supported");
    }
  }
  const LoadedImage img = load(a.in, err);
  save_image(apply_lut(img.image, cube.lut), a.out, a.bit_depth);
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

int run_bake(const BakeArgs& a, std::ostream& out, std::ostream& err) {
  const TransferRecipe recipe = recipe_from_json(read_text(a.recipe));
  if (recipe.kernel) err << "dst: warning: the spectral kernel is spatial and is not baked into the LUT\n";
  write_file(a.out, cube_for_recipe(recipe, a.lut_size));
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

int run_batch(const BatchArgs& a, std::ostream& out, std::ostream& err) {
  const TransferRecipe recipe = recipe_from_json(read_text(a.recipe));
  const auto files = expand_glob(a.pattern);
  if (files.empty()) raise(ErrorKind::InvalidArgument, "no files match '" + a.pattern + "'");
  if (!a.out_dir.empty()) fs::create_directories(a.out_dir);

  int done = 0, failed = 0;
  for (const auto& in : files) {
    const std::string stem = in.stem().string();
    // Outputs of an earlier run written next to their inputs.
    if (a.out_dir.empty() && stem.ends_with(a.suffix)) continue;
    const fs::path dir = a.out_dir.empty() ? in.parent_path() : fs::path(a.out_dir);
    const fs::path dest = dir / (stem + a.suffix + in.extension().string());
    try {
      const LoadedImage img = load(in, err);
      save_image(apply_recipe(img.image, recipe), dest, a.bit_depth);
      out << "wrote " << dest.string() << '\n';
      ++done;
    } catch (const std::exception& e) {
      err << "dst: error: " << in.string() << ": " << e.what() << '\n';
      ++failed;
    }
  }
  out << done << " written, " << failed << " failed\n";
  return failed == 0 ? kExitOk : kExitProcessing;
}

int run_serve(const ServeArgs& a, std::ostream& out) {
  ServiceOptions opt;
  opt.bind = a.bind;
  opt.port = a.port;
  opt.max_body_bytes = static_cast<std::size_t>(a.max_upload_mb * 1024.0 * 1024.0);
  opt.workers = a.workers;
  Service service(opt);
  const int port = service.bind();
  if (port < 0) raise(ErrorKind::InvalidArgument, "cannot bind " + a.bind + ":" + std::to_string(a.port));
  out << "listening on http://" << a.bind << ':' << port << '\n' << std::flush;
  return service.run() ? kExitOk : kExitProcessing;
}

const CLI::Validator kCropRect(
    [](std::string& text) -> std::string {
      try {
        (void)parse_crop(text);
        return {};
      } catch (const std::exception& e) {
        return e.what();
      }
    },
    "X,Y,W,H", "crop");

void add_bit_depth(CLI::App* sub, int& depth) {
  sub->add_option("--bit-depth", depth, "Integer output depth")->check(CLI::IsMember({8, 16}))->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photorealistic style transfer by decoupled moments and spectra", "dst"};
  app.require_subcommand(1);

  TransferArgs ta;
  auto* transfer = app.add_subcommand("transfer", "Match the colour moments (and optionally the spectrum) of a target");
  transfer->add_option("--src", ta.src, "Image to restyle")->required()->check(CLI::ExistingFile);
  transfer->add_option("--tgt", ta.tgt, "Style target")->required()->check(CLI::ExistingFile);
  transfer->add_option("--src-crop", ta.src_crop, "Source statistics region x,y,w,h")->check(kCropRect);
  transfer->add_option("--tgt-crop", ta.tgt_crop, "Target statistics region x,y,w,h")->check(kCropRect);
  ta.orders_i_opt = transfer->add_option("--orders-i", ta.orders_i, "Moments matched on I")
                        ->check(CLI::Range(0, 4))
                        ->capture_default_str();
  ta.orders_chroma_opt = transfer->add_option("--orders-chroma", ta.orders_chroma, "Moments matched on P and T")
                             ->check(CLI::Range(0, 4))
                             ->capture_default_str();
  ta.spectral_opt = transfer->add_flag("--spectral", ta.spectral, "Also transfer the luminance spectrum");
  ta.clamp_opt = transfer->add_flag("--clamp,!--no-clamp", ta.clamp, "Clamp the result to [0,1] (default: preserve)");
  transfer->add_option("--config", ta.config, "TransferConfig JSON; flags override it")->check(CLI::ExistingFile);
  transfer->add_option("--out", ta.out, "Result image (.png, .ppm, .pfm)");
  transfer->add_option("--emit-lut", ta.emit_lut, "Write the look as an Adobe .cube");
  transfer->add_option("--lut-size", ta.lut_size, "LUT lattice size")->check(CLI::Range(2, 256))->capture_default_str();
  transfer->add_option("--emit-recipe", ta.emit_recipe, "Write the frozen recipe as JSON");
  add_bit_depth(transfer, ta.bit_depth);

  OpticsArgs oa;
  auto* optics = app.add_subcommand("optics", "Give the source the blur or sharpness of T' relative to T");
  optics->add_option("--src", oa.src, "Image to filter")->required()->check(CLI::ExistingFile);
  optics->add_option("--t", oa.t, "Reference frame")->required()->check(CLI::ExistingFile);
  optics->add_option("--tprime", oa.tprime, "Same frame with the wanted optics")->required()->check(CLI::ExistingFile);
  optics->add_option("--diff-crop", oa.diff_crop, "Region of T and T' used for the kernel x,y,w,h")->check(kCropRect);
  optics->add_option("--out", oa.out, "Result image")->required();
  optics->add_option("--emit-kernel", oa.emit_kernel, "Write the spatial kernel as text");
  add_bit_depth(optics, oa.bit_depth);

  ApplyLutArgs la;
  auto* apply = app.add_subcommand("apply-lut", "Apply a .cube to an image");
  apply->add_option("--lut", la.lut, ".cube file")->required()->check(CLI::ExistingFile);
  apply->add_option("--in", la.in, "Input image")->required()->check(CLI::ExistingFile);
  apply->add_option("--out", la.out, "Output image")->required();
  add_bit_depth(apply, la.bit_depth);

  BakeArgs ba;
  auto* bake = app.add_subcommand("bake-lut", "Bake a recipe JSON into a .cube");
  bake->add_option("--recipe", ba.recipe, "Recipe JSON")->required()->check(CLI::ExistingFile);
  bake->add_option("--out", ba.out, ".cube file")->required();
  bake->add_option("--lut-size", ba.lut_size, "LUT lattice size")->check(CLI::Range(2, 256))->capture_default_str();

  BatchArgs ka;
  auto* batch = app.add_subcommand("batch", "Replay a recipe on every matching image");
  batch->add_option("--recipe", ka.recipe, "Recipe JSON")->required()->check(CLI::ExistingFile);
  batch->add_option("--glob", ka.pattern, "Input pattern, e.g. 'shots/*.png'")->required();
  batch->add_option("--out-dir", ka.out_dir, "Output directory (default: next to each input)");
  batch->add_option("--suffix", ka.suffix, "Appended to each output stem")->capture_default_str();
  add_bit_depth(batch, ka.bit_depth);

  ServeArgs sa;
  sa.port = port_from_env(8080);
  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  serve->add_option("--bind", sa.bind, "Listen address")->capture_default_str();
  serve->add_option("--port", sa.port, "Listen port (default from DST_PORT, else 8080)")->check(CLI::Range(0, 65535));
  serve->add_option("--max-upload-mb", sa.max_upload_mb, "Request body cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  serve->add_option("--workers", sa.workers, "Concurrent handlers (0: one per core)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (transfer->parsed() && ta.out.empty() && ta.emit_lut.empty() && ta.emit_recipe.empty()) {
      throw CLI::ValidationError("transfer", "nothing to write: give --out, --emit-lut or --emit-recipe");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == static_cast<int>(CLI::ExitCodes::Success)) return kExitOk;
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitUsage;
  }

  try {
    if (transfer->parsed()) return run_transfer(ta, out, err);
    if (optics->parsed()) return run_optics(oa, out, err);
    if (apply->parsed()) return run_apply_lut(la, out, err);
    if (bake->parsed()) return run_bake(ba, out, err);
    if (batch->parsed()) return run_batch(ka, out, err);
    if (serve->parsed()) return run_serve(sa, out);
  } catch (const std::exception& e) {
    err << "dst: error: " << e.what() << '\n';
    return kExitProcessing;
  }
  return kExitUsage;
}

}  // namespace dst::app
