#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patchnorm/commands.hpp"

namespace {

void add_common_flags(CLI::App* cmd, patchnorm::RunConfig* cfg) {
  cmd->add_option("--seed", cfg->seed, "PRNG seed (all randomness flows here)");
  cmd->add_option("--patch-size", cfg->patch_size, "patch size in pixels");
  cmd->add_option("--embed-dim", cfg->embed_dim, "embedding dimension D");
  cmd->add_option("--out", cfg->out_dir, "output directory");
}

std::vector<double> parse_factors(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? csv.size() - pos
                                                   : comma - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Early-stage patch-embedding robustness toolkit"};
  app.require_subcommand(1);

  patchnorm::RunConfig cfg;
  std::string factors_csv;

  CLI::App* invariance = app.add_subcommand(
      "invariance", "Run the scale/bias invariance and inconsistency suite");
  invariance->add_option("--variant", cfg.variant, "vit|swin|both")
      ->required();
  invariance->add_option("--trials", cfg.trials, "number of random trials");
  add_common_flags(invariance, &cfg);

  CLI::App* ecpe = app.add_subcommand(
      "ecpe", "Positional-embedding gradient mass vs contrast factor");
  ecpe->add_option("--variant", cfg.variant, "vit|swin|both");
  ecpe->add_option("--mode", cfg.mode, "idealized|pil");
  ecpe->add_option("--factors", factors_csv, "comma-separated contrast factors")
      ->required();
  ecpe->add_option("--data", cfg.data_dir, "dataset directory with manifest")
      ->required();
  add_common_flags(ecpe, &cfg);

  CLI::App* corrupt =
      app.add_subcommand("corrupt", "Write corrupted copies of input images");
  corrupt->add_option("--kind", cfg.kind,
                      "contrast|brightness|gamma|translation|rotation");
  corrupt->add_option("--mode", cfg.mode, "idealized|pil");
  corrupt->add_option("--factors", factors_csv, "comma-separated factors")
      ->required();
  corrupt->add_option("images", cfg.inputs, "input PPM images")->required();
  add_common_flags(corrupt, &cfg);

  CLI::App* bench = app.add_subcommand(
      "bench", "Train linear probes and run a corruption sweep");
  bench->add_option("--variant", cfg.variant, "vit|swin|both");
  bench->add_option("--mode", cfg.mode, "idealized|pil");
  bench->add_option("--kind", cfg.kind, "corruption kind for the sweep");
  bench->add_option("--factors", factors_csv, "comma-separated severities");
  bench->add_option("--data", cfg.data_dir, "dataset directory");
  bench->add_option("--num-images", cfg.num_images, "dataset size if generated");
  bench->add_option("--image-size", cfg.image_size, "image size if generated");
  add_common_flags(bench, &cfg);

  CLI::App* gen = app.add_subcommand("gen", "Generate the synthetic dataset");
  gen->add_option("--num-images", cfg.num_images, "number of images");
  gen->add_option("--image-size", cfg.image_size, "square image size");
  gen->add_option("--data", cfg.data_dir, "target directory");
  add_common_flags(gen, &cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.factors = parse_factors(factors_csv);
    if (invariance->parsed()) return patchnorm::run_invariance(cfg);
    if (ecpe->parsed()) {
      if (ecpe->count("--variant") == 0) cfg.variant = "both";
      return patchnorm::run_ecpe(cfg);
    }
    if (corrupt->parsed()) {
      if (corrupt->count("--mode") == 0) cfg.mode = "pil";
      return patchnorm::run_corrupt(cfg);
    }
    if (bench->parsed()) {
      if (bench->count("--variant") == 0) cfg.variant = "both";
      if (bench->count("--mode") == 0) cfg.mode = "pil";
      if (cfg.factors.empty()) cfg.factors = {1, 2, 3};
      return patchnorm::run_bench(cfg);
    }
    if (gen->parsed()) return patchnorm::run_gen(cfg);
  } catch (const patchnorm::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const patchnorm::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
