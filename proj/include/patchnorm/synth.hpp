#ifndef PATCHNORM_SYNTH_HPP
#define PATCHNORM_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "patchnorm/image.hpp"

namespace patchnorm {

enum class Background { Flat, Noise };

// Labeled shapes-on-background dataset: one circle/square/triangle per
// image in one of num_classes/3 color bins. Colors stay mid-range
// (roughly 64..192) so moderate contrast factors avoid saturation.
struct SynthSpec {
  std::size_t num_images = 900;
  int image_size = 96;
  std::size_t num_classes = 9;  // shape kinds (3) x color bins
  std::uint64_t seed = 1;
  Background background = Background::Noise;
};

struct ManifestEntry {
  std::string file;
  std::size_t label = 0;
  std::uint64_t seed = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string checksum;  // "fnv1a64:" + hex over PPM bytes in entry order
  SynthSpec spec;
};

struct SynthDataset {
  std::vector<Image> images;
  std::vector<std::size_t> labels;
  Manifest manifest;
};

SynthDataset generate(const SynthSpec& spec);

// Writes <dir>/img_00000.ppm ... plus <dir>/manifest.json.
Manifest write_dataset(const SynthSpec& spec, const std::string& dir);

SynthDataset load_dataset(const std::string& dir);

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace patchnorm

#endif  // PATCHNORM_SYNTH_HPP
