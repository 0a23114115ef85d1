#include "patchnorm/probe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace patchnorm {

namespace {

using ordered_json = nlohmann::ordered_json;

double identity_factor(CorruptionKind kind) {
  return (kind == CorruptionKind::Translation ||
          kind == CorruptionKind::Rotation)
             ? 0.0
             : 1.0;
}

Image corrupt_image(const Image& img, CorruptionKind kind, double factor,
                    PixelMode mode) {
  // Translation windows sized for the pipeline resolution: 16px margins.
  return apply_corruption(img, kind, factor, mode, img.width + 32, img.width);
}

}  // namespace

std::vector<double> extract_features(const Image& img,
                                     const EarlyStageConfig& cfg,
                                     FeatureReduction reduction) {
  const Matrix z = early_stage_forward(patchify(img, cfg), cfg);
  if (reduction == FeatureReduction::Flatten) {
    return z.data();
  }
  std::vector<double> pooled(z.cols(), 0.0);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    for (std::size_t c = 0; c < z.cols(); ++c) pooled[c] += z(r, c);
  }
  for (double& v : pooled) v /= static_cast<double>(z.rows());
  return pooled;
}

ProbeModel train_probe(const std::vector<std::vector<double>>& features,
                       const std::vector<std::size_t>& labels,
                       std::size_t num_classes,
                       const ProbeTrainConfig& config) {
  if (num_classes < 2) throw std::invalid_argument("train_probe: need >= 2 classes");
  if (features.empty() || features.size() != labels.size()) {
    throw std::invalid_argument("train_probe: features/labels mismatch");
  }
  const std::size_t m = features.size();
  const std::size_t f = features[0].size();

  ProbeModel model;
  model.weights = Matrix(f, num_classes);
  model.bias.assign(num_classes, 0.0);

  std::vector<double> logits(num_classes);
  Matrix grad_w(f, num_classes);
  std::vector<double> grad_b(num_classes);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    double loss = 0.0;

    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<double>& x = features[i];
      for (std::size_t c = 0; c < num_classes; ++c) {
        double v = model.bias[c];
        for (std::size_t k = 0; k < f; ++k) v += x[k] * model.weights(k, c);
        logits[c] = v;
      }
      const double mx = *std::max_element(logits.begin(), logits.end());
      double denom = 0.0;
      for (double& v : logits) {
        v = std::exp(v - mx);
        denom += v;
      }
      loss -= std::log(logits[labels[i]] / denom);
      for (std::size_t c = 0; c < num_classes; ++c) {
        const double residual =
            logits[c] / denom - (c == labels[i] ? 1.0 : 0.0);
        grad_b[c] += residual;
        for (std::size_t k = 0; k < f; ++k) {
          grad_w(k, c) += residual * x[k];
        }
      }
    }

    loss /= static_cast<double>(m);
    for (double v : model.weights.data()) loss += 0.5 * config.l2 * v * v;
    if (!std::isfinite(loss)) {
      throw std::runtime_error("train_probe: non-finite loss at epoch " +
                               std::to_string(epoch));
    }
    model.final_loss = loss;

    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < f; ++k) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        model.weights(k, c) -= config.lr * (grad_w(k, c) * inv_m +
                                            config.l2 * model.weights(k, c));
      }
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      model.bias[c] -= config.lr * grad_b[c] * inv_m;
    }
  }
  return model;
}

std::size_t predict(const ProbeModel& model,
                    const std::vector<double>& feature) {
  if (feature.size() != model.weights.rows()) {
    throw std::invalid_argument("predict: feature length mismatch");
  }
  std::size_t best = 0;
  double best_score = -1e300;
  for (std::size_t c = 0; c < model.weights.cols(); ++c) {
    double v = model.bias[c];
    for (std::size_t k = 0; k < feature.size(); ++k) {
      v += feature[k] * model.weights(k, c);
    }
    if (v > best_score) {
      best_score = v;
      best = c;
    }
  }
  return best;
}

SweepResult run_sweep(const std::vector<Image>& test_images,
                      const std::vector<std::size_t>& test_labels,
                      const ProbeModel& probe, const EarlyStageConfig& cfg,
                      CorruptionKind kind, const std::vector<double>& factors,
                      PixelMode mode, std::uint64_t seed) {
  if (test_images.size() != test_labels.size() || test_images.empty()) {
    throw std::invalid_argument("run_sweep: empty or mismatched test set");
  }
  const double ident = identity_factor(kind);
  if (std::find(factors.begin(), factors.end(), ident) == factors.end()) {
    throw std::invalid_argument("run_sweep: factor list must include identity");
  }

  SweepResult result;
  result.corruption = kind;
  result.factors = factors;
  result.variant = cfg.variant;
  result.num_test = test_images.size();
  result.seed = seed;
  result.mode = mode;

  for (double factor : factors) {
    std::size_t correct = 0;
    std::vector<std::size_t> preds;
    preds.reserve(test_images.size());
    for (std::size_t i = 0; i < test_images.size(); ++i) {
      const Image corrupted = corrupt_image(test_images[i], kind, factor, mode);
      const std::size_t pred =
          predict(probe, extract_features(corrupted, cfg, probe.reduction));
      preds.push_back(pred);
      if (pred == test_labels[i]) ++correct;
    }
    result.accuracy.push_back(static_cast<double>(correct) /
                              static_cast<double>(test_images.size()));
    result.predictions.push_back(std::move(preds));
  }
  return result;
}

void save_probe(const ProbeModel& model, const std::string& path) {
  ordered_json header;
  header["format"] = "patchnorm-probe-v1";
  header["feature_dim"] = model.weights.rows();
  header["num_classes"] = model.weights.cols();
  header["reduction"] =
      model.reduction == FeatureReduction::MeanPoolRows ? "mean" : "flatten";
  header["final_loss"] = model.final_loss;
  header["dtype"] = "float64-native";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_probe: cannot write " + path);
  out << header.dump() << "\n";
  out.write(reinterpret_cast<const char*>(model.weights.data().data()),
            static_cast<std::streamsize>(model.weights.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(model.bias.data()),
            static_cast<std::streamsize>(model.bias.size() * sizeof(double)));
}

ProbeModel load_probe(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_probe: cannot open " + path);
  std::string line;
  std::getline(in, line);
  const ordered_json header = ordered_json::parse(line);
  if (header.at("format") != "patchnorm-probe-v1") {
    throw std::runtime_error("load_probe: unrecognized format");
  }
  const std::size_t f = header.at("feature_dim").get<std::size_t>();
  const std::size_t c = header.at("num_classes").get<std::size_t>();

  ProbeModel model;
  model.weights = Matrix(f, c);
  model.bias.resize(c);
  model.reduction = header.at("reduction") == "mean"
                        ? FeatureReduction::MeanPoolRows
                        : FeatureReduction::Flatten;
  model.final_loss = header.at("final_loss").get<double>();
  in.read(reinterpret_cast<char*>(model.weights.data().data()),
          static_cast<std::streamsize>(f * c * sizeof(double)));
  in.read(reinterpret_cast<char*>(model.bias.data()),
          static_cast<std::streamsize>(c * sizeof(double)));
  if (!in) throw std::runtime_error("load_probe: truncated file");
  return model;
}

}  // namespace patchnorm
