#include "patchnorm/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "patchnorm/matrix.hpp"

namespace patchnorm {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mid-range color bins; bases stay inside [64, 192] even after jitter.
const int kBinColors[6][3] = {
    {168, 88, 88},  {88, 168, 88},  {88, 88, 168},
    {168, 168, 88}, {168, 88, 168}, {88, 168, 168},
};

enum class Shape { Circle, Square, Triangle };

bool inside_shape(Shape shape, double dx, double dy, double r) {
  switch (shape) {
    case Shape::Circle:
      return dx * dx + dy * dy <= r * r;
    case Shape::Square:
      return std::fabs(dx) <= r && std::fabs(dy) <= r;
    case Shape::Triangle:
      // Upward triangle: base at dy = +r, apex at dy = -r.
      return dy >= -r && dy <= r && std::fabs(dx) <= (dy + r) / 2.0;
  }
  return false;
}

Image render(const SynthSpec& spec, std::size_t label, std::uint64_t seed) {
  const std::size_t bins = spec.num_classes / 3;
  const Shape shape = static_cast<Shape>(label / bins);
  const std::size_t bin = label % bins;
  UniformRng rng(seed);

  const int size = spec.image_size;
  Image img(size, size, PixelMode::PilExact);
  if (spec.background == Background::Flat) {
    const double bg = std::floor(rng.next(112.0, 145.0));
    for (double& v : img.data) v = bg;
  } else {
    for (double& v : img.data) v = std::floor(rng.next(104.0, 153.0));
  }

  double color[3];
  for (int c = 0; c < 3; ++c) {
    color[c] = kBinColors[bin][c] + std::floor(rng.next(-12.0, 13.0));
  }
  // Narrow size band keeps the shape-area feature separable per kind.
  const double r = rng.next(0.18 * size, 0.22 * size);
  const double cx = rng.next(r + 1.0, size - r - 1.0);
  const double cy = rng.next(r + 1.0, size - r - 1.0);

  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (inside_shape(shape, x - cx, y - cy, r)) {
        for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
      }
    }
  }
  return img;
}

void validate(const SynthSpec& spec) {
  if (spec.num_classes % 3 != 0 || spec.num_classes == 0 ||
      spec.num_classes > 18) {
    throw std::invalid_argument("SynthSpec: num_classes must be 3, 6, ... 18");
  }
  if (spec.num_images < spec.num_classes) {
    throw std::invalid_argument("SynthSpec: num_images < num_classes");
  }
  if (spec.image_size < 16) {
    throw std::invalid_argument("SynthSpec: image_size too small");
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes,
                      std::uint64_t state) {
  for (std::uint8_t b : bytes) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  return state;
}

SynthDataset generate(const SynthSpec& spec) {
  validate(spec);
  SynthDataset ds;
  ds.manifest.spec = spec;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < spec.num_images; ++i) {
    const std::size_t label = i % spec.num_classes;  // balanced within 1
    const std::uint64_t img_seed = splitmix64(spec.seed + i);
    Image img = render(spec, label, img_seed);
    hash = fnv1a64(encode_ppm(img), hash);

    char name[32];
    std::snprintf(name, sizeof(name), "img_%05zu.ppm", i);
    ds.manifest.entries.push_back({name, label, img_seed});
    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
  }
  char hex[24];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  ds.manifest.checksum = hex;
  return ds;
}

namespace {

ordered_json manifest_to_json(const Manifest& m) {
  ordered_json j;
  j["format"] = "patchnorm-manifest-v1";
  j["checksum"] = m.checksum;
  j["checksum_algorithm"] = "FNV-1a 64-bit over P6 PPM bytes in entry order";
  j["generator"] = {
      {"num_images", m.spec.num_images},
      {"image_size", m.spec.image_size},
      {"num_classes", m.spec.num_classes},
      {"seed", m.spec.seed},
      {"background", m.spec.background == Background::Flat ? "flat" : "noise"},
  };
  ordered_json entries = ordered_json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"file", e.file}, {"label", e.label}, {"seed", e.seed}});
  }
  j["entries"] = std::move(entries);
  return j;
}

}  // namespace

Manifest write_dataset(const SynthSpec& spec, const std::string& dir) {
  SynthDataset ds = generate(spec);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    write_ppm(ds.images[i], dir + "/" + ds.manifest.entries[i].file);
  }
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("write_dataset: cannot write manifest");
  out << manifest_to_json(ds.manifest).dump(2) << "\n";
  return ds.manifest;
}

SynthDataset load_dataset(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) {
    throw std::runtime_error("load_dataset: missing manifest: " + dir +
                             "/manifest.json");
  }
  const ordered_json j = ordered_json::parse(in);
  SynthDataset ds;
  ds.manifest.checksum = j.at("checksum").get<std::string>();
  const auto& g = j.at("generator");
  ds.manifest.spec.num_images = g.at("num_images").get<std::size_t>();
  ds.manifest.spec.image_size = g.at("image_size").get<int>();
  ds.manifest.spec.num_classes = g.at("num_classes").get<std::size_t>();
  ds.manifest.spec.seed = g.at("seed").get<std::uint64_t>();
  ds.manifest.spec.background = g.at("background").get<std::string>() == "flat"
                                    ? Background::Flat
                                    : Background::Noise;
  for (const auto& e : j.at("entries")) {
    ManifestEntry entry;
    entry.file = e.at("file").get<std::string>();
    entry.label = e.at("label").get<std::size_t>();
    entry.seed = e.at("seed").get<std::uint64_t>();
    ds.images.push_back(read_ppm(dir + "/" + entry.file));
    ds.labels.push_back(entry.label);
    ds.manifest.entries.push_back(std::move(entry));
  }
  return ds;
}

}  // namespace patchnorm
