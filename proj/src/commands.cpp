#include "patchnorm/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "patchnorm/corruptions.hpp"
#include "patchnorm/ecpe.hpp"
#include "patchnorm/embedding.hpp"
#include "patchnorm/probe.hpp"
#include "patchnorm/svg.hpp"
#include "patchnorm/synth.hpp"

namespace patchnorm {

namespace {

using ordered_json = nlohmann::ordered_json;

// Stabilizer for the synthetic-experiment configs. The analysis-mode
// invariance claims hold only up to O(eps / row variance), so the
// experiments use a much smaller eps than the 1e-5 LayerNorm default.
constexpr double kExperimentEpsilon = 1e-10;

std::vector<Variant> parse_variants(const std::string& v) {
  if (v == "vit") return {Variant::VitStyle};
  if (v == "swin") return {Variant::SwinStyle};
  if (v == "both") return {Variant::VitStyle, Variant::SwinStyle};
  throw UsageError("unknown variant: " + v + " (expected vit|swin|both)");
}

const char* variant_name(Variant v) {
  return v == Variant::VitStyle ? "vit" : "swin";
}

PixelMode parse_mode(const std::string& m) {
  if (m == "idealized") return PixelMode::Idealized;
  if (m == "pil") return PixelMode::PilExact;
  throw UsageError("unknown mode: " + m + " (expected idealized|pil)");
}

CorruptionKind parse_kind(const std::string& k) {
  if (k == "contrast") return CorruptionKind::Contrast;
  if (k == "brightness") return CorruptionKind::Brightness;
  if (k == "gamma") return CorruptionKind::Gamma;
  if (k == "translation") return CorruptionKind::Translation;
  if (k == "rotation") return CorruptionKind::Rotation;
  throw UsageError("unknown corruption kind: " + k);
}

void write_text(const std::string& path, const std::string& text) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path().empty()
          ? "."
          : std::filesystem::path(path).parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

void require_identity_factor(const std::vector<double>& factors,
                             double identity) {
  if (factors.empty()) throw UsageError("factor list is empty");
  if (std::find(factors.begin(), factors.end(), identity) == factors.end()) {
    throw UsageError("factor list must include the identity factor " +
                     std::to_string(identity));
  }
}

// Patch-level sampling for the invariance suite: pixel-scale magnitudes
// so row variances sit in the thousands. The stated tolerances assume
// this regime; rows with variance near 1 see O(eps/var) drift from the
// stabilizer that would swamp them.
Matrix sample_patches(std::size_t n, std::size_t d, std::uint64_t seed) {
  return mat_random_uniform(n, d, -128.0, 128.0, seed);
}

SynthSpec synth_spec_from(const RunConfig& cfg) {
  SynthSpec spec;
  spec.num_images = cfg.num_images;
  spec.image_size = cfg.image_size;
  spec.num_classes = 9;
  spec.seed = cfg.seed;
  spec.background = Background::Noise;
  return spec;
}

SynthDataset obtain_dataset(const RunConfig& cfg, bool generate_if_missing) {
  const std::string dir =
      cfg.data_dir.empty() ? cfg.out_dir + "/data" : cfg.data_dir;
  if (!std::filesystem::exists(dir + "/manifest.json")) {
    if (!generate_if_missing) {
      throw IoError("missing dataset manifest: " + dir + "/manifest.json");
    }
    write_dataset(synth_spec_from(cfg), dir);
  }
  return load_dataset(dir);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

}  // namespace

int run_invariance(const RunConfig& cfg) {
  const std::vector<Variant> variants = parse_variants(cfg.variant);
  const std::size_t n = 16;
  const std::size_t d = cfg.embed_dim;
  const std::size_t trials = cfg.trials;

  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  auto add_check = [&](const std::string& name, double measured,
                       const std::string& cmp, double threshold, bool pass) {
    checks.push_back({{"name", name},
                      {"measured", measured},
                      {"comparator", cmp},
                      {"threshold", threshold},
                      {"pass", pass}});
    all_pass = all_pass && pass;
  };

  // Normalization invariance of the N step (variant independent).
  {
    const double a_set[] = {0.5, 2.0, 5.0};
    const double b_set[] = {-1.0, 0.0, 3.0};
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Matrix x = sample_patches(n, d, cfg.seed + t);
      const Matrix nx = ln_normalize(x, 1e-5);
      for (double a : a_set) {
        for (double b : b_set) {
          worst = std::max(
              worst, max_abs_diff(ln_normalize(scale_shift(x, a, b), 1e-5), nx));
        }
      }
    }
    add_check("normalize_scale_bias_invariance", worst, "<", 1e-6,
              worst < 1e-6);
  }

  for (Variant variant : variants) {
    const std::string tag = variant_name(variant);
    if (variant == Variant::SwinStyle) {
      const double a_set[] = {0.5, 2.0, 5.0};
      const double b_set[] = {-1.0, 0.0, 3.0};
      double worst = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const EarlyStageConfig ecfg =
            make_matrix_config(variant, n, d, cfg.seed + 7919 * t);
        const Matrix x = sample_patches(n, d, cfg.seed + t);
        for (double a : a_set) {
          for (double b : b_set) {
            worst = std::max(worst, consistency_gap(x, {a, b}, ecfg));
          }
        }
      }
      add_check(tag + "_end_to_end_invariance", worst, "<", 1e-8,
                worst < 1e-8);
    } else {
      // Inconsistency under a=2, b=0.5: expected and counted as a pass
      // when it shows up in at least 99% of trials. Sampled at unit
      // scale so the U[-1,1] positional term is not negligible against
      // the tokens; at pixel scale the gap would vanish trivially.
      std::size_t hits = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const EarlyStageConfig ecfg =
            make_matrix_config(variant, n, d, cfg.seed + 7919 * t);
        const Matrix x = mat_random_uniform(n, d, -1.0, 1.0, cfg.seed + t);
        if (consistency_gap(x, {2.0, 0.5}, ecfg) > 1e-2) ++hits;
      }
      const double rate = static_cast<double>(hits) / trials;
      add_check(tag + "_scale_bias_inconsistency_rate", rate, ">=", 0.99,
                rate >= 0.99);
    }
  }

  ordered_json report;
  report["tool"] = kToolVersion;
  report["command"] = "invariance";
  report["variant"] = cfg.variant;
  report["seed"] = cfg.seed;
  report["trials"] = trials;
  report["checks"] = checks;
  report["all_pass"] = all_pass;
  write_text(cfg.out_dir + "/invariance_report.json", report.dump(2) + "\n");

  for (const auto& c : report["checks"]) {
    std::printf("%-40s %s (measured %.3e)\n",
                c["name"].get<std::string>().c_str(),
                c["pass"].get<bool>() ? "pass" : "FAIL",
                c["measured"].get<double>());
  }
  return all_pass ? 0 : 1;
}

int run_ecpe(const RunConfig& cfg) {
  require_identity_factor(cfg.factors, 1.0);
  const PixelMode mode = parse_mode(cfg.mode);
  const std::vector<Variant> variants = parse_variants(cfg.variant);
  const SynthDataset ds = obtain_dataset(cfg, /*generate_if_missing=*/false);

  ordered_json report;
  report["tool"] = kToolVersion;
  report["command"] = "ecpe";
  report["seed"] = cfg.seed;
  report["mode"] = cfg.mode;
  report["dataset_checksum"] = ds.manifest.checksum;
  report["num_images"] = ds.images.size();

  std::vector<SvgSeries> series;
  const char* colors[] = {"#d62728", "#1f77b4"};
  ordered_json jvariants;
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    const Variant variant = variants[vi];
    const EarlyStageConfig ecfg = make_random_config(
        variant, ds.manifest.spec.image_size, cfg.patch_size, cfg.embed_dim,
        cfg.seed, /*centered=*/true, kExperimentEpsilon);

    SvgSeries s;
    s.label = variant_name(variant);
    s.color = colors[vi % 2];
    ordered_json reports = ordered_json::array();
    for (double factor : cfg.factors) {
      const EcpeReport r =
          ecpe_accumulate(ds.images, factor, ecfg, mode, cfg.seed);
      s.x.push_back(factor);
      s.y.push_back(r.ecpe_value);
      reports.push_back({{"corruption_factor", r.corruption_factor},
                         {"num_images", r.num_images},
                         {"ecpe_value", r.ecpe_value},
                         {"seed", r.seed},
                         {"mode", cfg.mode},
                         {"per_image_values", r.per_image_values}});
    }
    jvariants[variant_name(variant)] = std::move(reports);
    series.push_back(std::move(s));
  }
  report["variants"] = std::move(jvariants);

  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir + "/ecpe_report.json", report.dump(2) + "\n");
  write_line_chart(cfg.out_dir + "/ecpe_plot.svg",
                   "ECPE vs contrast factor", "contrast factor", "ECPE",
                   series);
  for (const SvgSeries& s : series) {
    std::printf("%s: ", s.label.c_str());
    for (double v : s.y) std::printf("%.6g ", v);
    std::printf("\n");
  }
  return 0;
}

int run_corrupt(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw UsageError("corrupt: no input images given");
  if (cfg.factors.empty()) throw UsageError("corrupt: no factors given");
  const CorruptionKind kind = parse_kind(cfg.kind);
  const PixelMode mode = parse_mode(cfg.mode);
  std::filesystem::create_directories(cfg.out_dir);

  for (const std::string& input : cfg.inputs) {
    if (!std::filesystem::exists(input)) {
      throw IoError("cannot read input image: " + input);
    }
    const Image img = read_ppm(input);
    const std::string stem = std::filesystem::path(input).stem().string();
    for (double factor : cfg.factors) {
      const Image out = apply_corruption(img, kind, factor, mode);
      char suffix[48];
      std::snprintf(suffix, sizeof(suffix), "_%s_%g.ppm", cfg.kind.c_str(),
                    factor);
      write_ppm(out, cfg.out_dir + "/" + stem + suffix);
    }
  }
  return 0;
}

int run_gen(const RunConfig& cfg) {
  const std::string dir =
      cfg.data_dir.empty() ? cfg.out_dir + "/data" : cfg.data_dir;
  const Manifest m = write_dataset(synth_spec_from(cfg), dir);
  std::printf("wrote %zu images to %s (%s)\n", m.entries.size(), dir.c_str(),
              m.checksum.c_str());
  return 0;
}

int run_bench(const RunConfig& cfg) {
  const CorruptionKind kind = parse_kind(cfg.kind);
  const double ident = (kind == CorruptionKind::Translation ||
                        kind == CorruptionKind::Rotation)
                           ? 0.0
                           : 1.0;
  require_identity_factor(cfg.factors, ident);
  const PixelMode mode = parse_mode(cfg.mode);
  const std::vector<Variant> variants = parse_variants(cfg.variant);

  Timer t_data;
  const SynthDataset ds = obtain_dataset(cfg, /*generate_if_missing=*/true);
  std::printf("data: %.2fs\n", t_data.seconds());

  // Deterministic 70:15:15 split from manifest order and seed.
  std::vector<std::size_t> order(ds.images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  UniformRng rng(cfg.seed ^ 0x517a1d5ed1ce0ULL);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.next_u64() % (i + 1)]);
  }
  const std::size_t n_train = order.size() * 70 / 100;
  const std::size_t n_val = order.size() * 15 / 100;
  std::vector<std::size_t> test_idx(order.begin() + n_train + n_val,
                                    order.end());

  std::vector<Image> test_images;
  std::vector<std::size_t> test_labels;
  for (std::size_t i : test_idx) {
    test_images.push_back(ds.images[i]);
    test_labels.push_back(ds.labels[i]);
  }

  std::filesystem::create_directories(cfg.out_dir);
  std::vector<SvgSeries> series;
  const char* colors[] = {"#d62728", "#1f77b4"};

  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    const Variant variant = variants[vi];
    const std::string tag = variant_name(variant);
    const EarlyStageConfig ecfg = make_random_config(
        variant, ds.manifest.spec.image_size, cfg.patch_size, cfg.embed_dim,
        cfg.seed, /*centered=*/true, kExperimentEpsilon);

    Timer t_feat;
    std::vector<std::vector<double>> train_features;
    std::vector<std::size_t> train_labels;
    for (std::size_t k = 0; k < n_train; ++k) {
      const std::size_t i = order[k];
      train_features.push_back(extract_features(
          ds.images[i], ecfg, FeatureReduction::MeanPoolRows));
      train_labels.push_back(ds.labels[i]);
    }
    std::printf("%s features: %.2fs\n", tag.c_str(), t_feat.seconds());

    Timer t_train;
    ProbeTrainConfig tc;
    tc.lr = 1.0;
    tc.epochs = 600;
    tc.l2 = 1e-4;
    tc.seed = cfg.seed;
    ProbeModel probe = train_probe(train_features, train_labels,
                                   ds.manifest.spec.num_classes, tc);
    probe.reduction = FeatureReduction::MeanPoolRows;
    save_probe(probe, cfg.out_dir + "/probe_" + tag + ".bin");
    std::printf("%s train: %.2fs (loss %.4f)\n", tag.c_str(),
                t_train.seconds(), probe.final_loss);

    Timer t_sweep;
    const SweepResult sweep = run_sweep(test_images, test_labels, probe, ecfg,
                                        kind, cfg.factors, mode, cfg.seed);
    std::printf("%s sweep: %.2fs\n", tag.c_str(), t_sweep.seconds());

    ordered_json j;
    j["tool"] = kToolVersion;
    j["command"] = "bench";
    j["variant"] = tag;
    j["corruption"] = cfg.kind;
    j["mode"] = cfg.mode;
    j["seed"] = cfg.seed;
    j["dataset_checksum"] = ds.manifest.checksum;
    j["num_test"] = sweep.num_test;
    j["factors"] = sweep.factors;
    j["accuracy"] = sweep.accuracy;
    write_text(cfg.out_dir + "/bench_" + tag + ".json", j.dump(2) + "\n");

    std::string csv = "factor,accuracy\n";
    for (std::size_t i = 0; i < sweep.factors.size(); ++i) {
      char row[64];
      std::snprintf(row, sizeof(row), "%.17g,%.17g\n", sweep.factors[i],
                    sweep.accuracy[i]);
      csv += row;
    }
    write_text(cfg.out_dir + "/bench_" + tag + ".csv", csv);

    SvgSeries s;
    s.label = tag;
    s.color = colors[vi % 2];
    s.x = sweep.factors;
    s.y = sweep.accuracy;
    series.push_back(std::move(s));

    std::printf("%s accuracy:", tag.c_str());
    for (double a : sweep.accuracy) std::printf(" %.4f", a);
    std::printf("\n");
  }

  write_line_chart(cfg.out_dir + "/bench_plot.svg",
                   "Accuracy vs " + cfg.kind + " severity", cfg.kind,
                   "test accuracy", series);
  return 0;
}

}  // namespace patchnorm
