#include "nfetc/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nfetc/error.hpp"

namespace nfetc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error("invalid value '" + value + "' for config key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw Error("invalid boolean '" + value + "' for config key '" + key + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) seeds.push_back(parse_number<std::uint64_t>(key, item));
  }
  if (seeds.empty()) throw Error("config key 'seeds' needs at least one seed");
  return seeds;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  HyperParams& hp = c.hp;
  if (key == "profile") {
    // Handled by build_config before the other keys.
  } else if (key == "lr") {
    hp.lr = parse_number<double>(key, value);
  } else if (key == "dp") {
    hp.position_dim = parse_number<std::size_t>(key, value);
  } else if (key == "ds") {
    hp.hidden_dim = parse_number<std::size_t>(key, value);
  } else if (key == "pi") {
    hp.input_keep = parse_number<double>(key, value);
  } else if (key == "po") {
    hp.output_keep = parse_number<double>(key, value);
  } else if (key == "lambda") {
    hp.lambda = parse_number<double>(key, value);
  } else if (key == "beta") {
    hp.beta = parse_number<double>(key, value);
  } else if (key == "window") {
    hp.window = parse_number<std::size_t>(key, value);
  } else if (key == "batch") {
    hp.batch = parse_number<std::size_t>(key, value);
  } else if (key == "epochs") {
    hp.epochs = parse_number<std::size_t>(key, value);
  } else if (key == "patience") {
    hp.patience = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    hp.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "seeds") {
    c.seeds = parse_seeds(key, value);
  } else if (key == "variant") {
    c.variant = value;
  } else if (key == "dev_fraction") {
    c.dev_fraction = parse_number<double>(key, value);
  } else if (key == "mention_positions") {
    c.mention_positions = parse_bool(key, value);
  } else if (key == "mention_dropout") {
    c.mention_dropout = parse_bool(key, value);
  } else if (key == "select_on_adjusted") {
    c.select_on_adjusted = parse_bool(key, value);
  } else if (key == "adjust_at_inference") {
    c.adjust_at_inference = parse_bool(key, value);
  } else if (key == "types") {
    c.types = value;
  } else if (key == "embeddings") {
    c.embeddings = value;
  } else if (key == "train") {
    c.train = value;
  } else if (key == "dev") {
    c.dev = value;
  } else if (key == "test") {
    c.test = value;
  } else if (key == "refine") {
    c.refine = value;
  } else if (key == "out") {
    c.out = value;
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

}  // namespace

void HyperParams::validate() const {
  if (!(lr > 0.0)) throw Error("lr must be positive");
  if (position_dim == 0 || hidden_dim == 0) throw Error("dp and ds must be positive");
  if (!(input_keep > 0.0 && input_keep <= 1.0)) throw Error("pi must lie in (0, 1]");
  if (!(output_keep > 0.0 && output_keep <= 1.0)) throw Error("po must lie in (0, 1]");
  if (!(lambda >= 0.0)) throw Error("lambda must be non-negative");
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
  if (window == 0) throw Error("window must be at least 1");
  if (batch == 0) throw Error("batch must be at least 1");
  if (epochs == 0) throw Error("epochs must be at least 1");
}

HyperParams profile_defaults(std::string_view profile) {
  HyperParams hp;
  if (profile == "figer") {
    hp.lr = 0.0002;
    hp.position_dim = 85;
    hp.hidden_dim = 180;
    hp.input_keep = 0.7;
    hp.output_keep = 0.9;
    hp.lambda = 0.0;
    hp.beta = 0.4;
  } else if (profile == "ontonotes") {
    hp.lr = 0.0002;
    hp.position_dim = 20;
    hp.hidden_dim = 440;
    hp.input_keep = 0.5;
    hp.output_keep = 0.5;
    hp.lambda = 0.0001;
    hp.beta = 0.3;
  } else {
    throw Error("unknown profile '" + std::string(profile) + "' (expected figer or ontonotes)");
  }
  return hp;
}

Settings parse_settings(std::string_view text, const std::string& source) {
  Settings out;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected key=value");
    std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(source, n, "empty key");
    out.emplace_back(std::move(key), trim(body.substr(eq + 1)));
  }
  return out;
}

Settings read_settings(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_settings(buffer.str(), file.string());
}

RunConfig build_config(const Settings& settings) {
  RunConfig c;
  for (const auto& [key, value] : settings) {
    if (key == "profile") c.profile = value;
  }
  c.hp = profile_defaults(c.profile);
  for (const auto& [key, value] : settings) apply(c, key, value);
  c.hp.validate();
  if (!(c.dev_fraction > 0.0 && c.dev_fraction < 1.0)) throw Error("dev_fraction must lie in (0, 1)");
  return c;
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"profile", "default set: figer | ontonotes"},
      {"lr", "Adam learning rate"},
      {"dp", "word position embedding size"},
      {"ds", "LSTM state size"},
      {"pi", "LSTM input dropout keep probability"},
      {"po", "LSTM output dropout keep probability"},
      {"lambda", "L2 regularization weight"},
      {"beta", "hierarchical loss normalization weight"},
      {"window", "context window C (tokens kept on each side of the mention)"},
      {"batch", "mini-batch size"},
      {"epochs", "maximum number of epochs"},
      {"patience", "epochs without dev improvement before stopping"},
      {"seed", "run seed"},
      {"seeds", "comma-separated seeds for a multi-run aggregate"},
      {"variant", "NFETC(f) | NFETC-hier(f) | NFETC(r) | NFETC-hier(r)"},
      {"dev_fraction", "share of the test set sampled as dev when no dev file is given"},
      {"mention_positions", "feed position vectors to the mention LSTM"},
      {"mention_dropout", "apply LSTM dropout to the mention LSTM"},
      {"select_on_adjusted", "variant loss picks its target on the adjusted distribution"},
      {"adjust_at_inference", "apply hierarchical normalization before the prediction argmax"},
      {"types", "type forest file"},
      {"embeddings", "word embedding file"},
      {"train", "training corpus"},
      {"dev", "development corpus (optional)"},
      {"test", "test corpus"},
      {"refine", "type refinement map (optional)"},
      {"out", "output directory"},
  };
  return keys;
}

std::string describe_config_keys() {
  const HyperParams figer = profile_defaults("figer");
  const HyperParams onto = profile_defaults("ontonotes");
  const HyperParams generic;
  auto num = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  auto defaults = [&](const std::string& key) -> std::string {
    auto both = [&](auto a, auto b) { return "figer=" + num(a) + " ontonotes=" + num(b); };
    if (key == "lr") return both(figer.lr, onto.lr);
    if (key == "dp") return both(figer.position_dim, onto.position_dim);
    if (key == "ds") return both(figer.hidden_dim, onto.hidden_dim);
    if (key == "pi") return both(figer.input_keep, onto.input_keep);
    if (key == "po") return both(figer.output_keep, onto.output_keep);
    if (key == "lambda") return both(figer.lambda, onto.lambda);
    if (key == "beta") return both(figer.beta, onto.beta);
    if (key == "window") return num(generic.window);
    if (key == "batch") return num(generic.batch);
    if (key == "epochs") return num(generic.epochs);
    if (key == "patience") return num(generic.patience);
    if (key == "seed") return num(generic.seed);
    if (key == "profile") return "figer";
    if (key == "variant") return RunConfig{}.variant;
    if (key == "dev_fraction") return num(RunConfig{}.dev_fraction);
    if (key == "mention_positions" || key == "adjust_at_inference") return "false";
    if (key == "mention_dropout" || key == "select_on_adjusted") return "true";
    if (key == "out") return "nfetc_out";
    return "-";
  };
  std::ostringstream out;
  out << "Config keys (key=value; --set overrides):\n";
  for (const auto& [key, help] : config_keys()) {
    out << "  " << key << std::string(key.size() < 20 ? 20 - key.size() : 1, ' ') << help
        << "  [default: " << defaults(key) << "]\n";
  }
  return out.str();
}

std::filesystem::path resolve_data_path(const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  if (const char* root = std::getenv("NFETC_DATA_ROOT"); root && *root) {
    return std::filesystem::path(root) / p;
  }
  return p;
}

}  // namespace nfetc
