#ifndef PATCHNORM_COMMANDS_HPP
#define PATCHNORM_COMMANDS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchnorm {

inline constexpr const char* kToolVersion = "patchnorm 0.1.0";

// Exit codes: 0 success, 1 property-suite failure, 2 usage, 3 I/O.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string variant = "vit";     // vit | swin | both
  std::string mode = "idealized";  // idealized | pil
  std::vector<double> factors;
  std::uint64_t seed = 1;
  int patch_size = 16;
  std::size_t embed_dim = 64;
  int image_size = 96;
  std::size_t trials = 1000;
  std::size_t num_images = 900;
  std::string kind = "contrast";  // contrast | brightness | gamma | translation | rotation
  std::string data_dir;
  std::string out_dir = ".";
  std::vector<std::string> inputs;
};

int run_invariance(const RunConfig& cfg);
int run_ecpe(const RunConfig& cfg);
int run_corrupt(const RunConfig& cfg);
int run_bench(const RunConfig& cfg);
int run_gen(const RunConfig& cfg);

}  // namespace patchnorm

#endif  // PATCHNORM_COMMANDS_HPP
