#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nfetc {

struct HyperParams {
  double lr = 0.0002;
  std::size_t position_dim = 85;  // d_p
  std::size_t hidden_dim = 180;   // d_s
  double input_keep = 0.7;        // p_i
  double output_keep = 0.9;       // p_o
  double lambda = 0.0;
  double beta = 0.4;
  std::size_t window = 10;  // C
  std::size_t batch = 512;
  std::size_t epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

/// Built-in per-dataset defaults: "figer" or "ontonotes".
HyperParams profile_defaults(std::string_view profile);

struct RunConfig {
  std::string profile = "figer";
  HyperParams hp = profile_defaults("figer");
  std::string variant = "NFETC-hier(r)";
  std::vector<std::uint64_t> seeds;  // empty: the single run uses hp.seed
  double dev_fraction = 0.1;

  // Model switches.
  bool mention_positions = false;
  bool mention_dropout = true;
  bool select_on_adjusted = true;
  bool adjust_at_inference = false;

  // Inputs and outputs. Relative paths resolve against NFETC_DATA_ROOT when set.
  std::filesystem::path types;
  std::filesystem::path embeddings;
  std::filesystem::path train;
  std::filesystem::path dev;   // optional; carved from `test` when absent
  std::filesystem::path test;
  std::filesystem::path refine;  // optional refinement map
  std::filesystem::path out = "nfetc_out";
};

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Flat `key=value` lines; blank lines and '#' comments ignored.
Settings read_settings(const std::filesystem::path& file);
Settings parse_settings(std::string_view text, const std::string& source);

/// Applies settings in order on top of the defaults of the last `profile`
/// setting (figer when none). Unknown keys are errors.
RunConfig build_config(const Settings& settings);

/// Known keys with a short description, in display order.
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Key reference with per-profile defaults, for --help.
std::string describe_config_keys();

std::filesystem::path resolve_data_path(const std::filesystem::path& p);

}  // namespace nfetc
