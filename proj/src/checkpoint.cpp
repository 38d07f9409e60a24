#include "nfetc/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nfetc/error.hpp"

namespace nfetc {

std::string format_double(double v) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, ptr);
}

void save_checkpoint(std::ostream& out, const NfetcModel& model, const TypeForest& forest) {
  const ModelConfig& c = model.config;
  if (c.num_types != forest.size()) throw Error("model and forest disagree on the number of types");
  out << "nfetc-checkpoint 1\n";
  out << "config word_dim " << c.word_dim << '\n'
      << "config position_dim " << c.position_dim << '\n'
      << "config hidden_dim " << c.hidden_dim << '\n'
      << "config num_types " << c.num_types << '\n'
      << "config window " << c.window << '\n'
      << "config mention_positions " << (c.mention_positions ? 1 : 0) << '\n'
      << "config mention_dropout " << (c.mention_dropout ? 1 : 0) << '\n';
  for (const auto& name : forest.names()) out << "type " << name << '\n';
  for (const auto& e : model.params.entries()) {
    out << "tensor " << e.name << ' ' << (e.trainable ? 1 : 0) << ' ' << e.value.rank();
    for (auto extent : e.value.shape()) out << ' ' << extent;
    out << '\n';
    bool first = true;
    for (double v : e.value.values()) {
      if (!first) out << ' ';
      out << format_double(v);
      first = false;
    }
    out << '\n';
  }
  out << "end\n";
}

void save_checkpoint(const std::filesystem::path& file, const NfetcModel& model,
                     const TypeForest& forest) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write checkpoint " + file.string());
  save_checkpoint(out, model, forest);
  if (!out) throw Error("failed writing checkpoint " + file.string());
}

Checkpoint load_checkpoint(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t n = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++n;
    return true;
  };
  if (!next() || line != "nfetc-checkpoint 1") throw ParseError(source, 1, "not an nfetc checkpoint");

  Checkpoint ckpt;
  ModelConfig& c = ckpt.model.config;
  bool ended = false;
  while (next()) {
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (kind == "config") {
      std::string key;
      std::size_t value = 0;
      if (!(fields >> key >> value)) throw ParseError(source, n, "malformed config line");
      if (key == "word_dim") c.word_dim = value;
      else if (key == "position_dim") c.position_dim = value;
      else if (key == "hidden_dim") c.hidden_dim = value;
      else if (key == "num_types") c.num_types = value;
      else if (key == "window") c.window = value;
      else if (key == "mention_positions") c.mention_positions = value != 0;
      else if (key == "mention_dropout") c.mention_dropout = value != 0;
      else throw ParseError(source, n, "unknown config key '" + key + "'");
    } else if (kind == "type") {
      std::string name;
      if (!(fields >> name)) throw ParseError(source, n, "malformed type line");
      ckpt.type_names.push_back(name);
    } else if (kind == "tensor") {
      std::string name;
      int trainable = 0;
      std::size_t rank = 0;
      if (!(fields >> name >> trainable >> rank) || rank == 0) {
        throw ParseError(source, n, "malformed tensor header");
      }
      Shape shape(rank);
      for (auto& extent : shape) {
        if (!(fields >> extent) || extent == 0) throw ParseError(source, n, "malformed tensor shape");
      }
      if (!next()) throw ParseError(source, n, "missing values for tensor '" + name + "'");
      std::vector<double> values;
      values.reserve(element_count(shape));
      const char* p = line.data();
      const char* end = line.data() + line.size();
      while (p < end) {
        while (p < end && *p == ' ') ++p;
        if (p == end) break;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) throw ParseError(source, n, "invalid value in tensor '" + name + "'");
        values.push_back(v);
        p = ptr;
      }
      if (values.size() != element_count(shape)) {
        throw ParseError(source, n, "tensor '" + name + "' has " + std::to_string(values.size()) +
                                        " values, expected " + std::to_string(element_count(shape)));
      }
      ckpt.model.params.add(name, Tensor(shape, std::move(values)), trainable != 0);
    } else if (kind == "end") {
      ended = true;
      break;
    } else {
      throw ParseError(source, n, "unexpected line");
    }
  }
  if (!ended) throw ParseError(source, n, "truncated checkpoint");
  if (ckpt.type_names.size() != c.num_types) {
    throw ParseError(source, 0, "type list does not match num_types");
  }
  try {
    validate_params(c, ckpt.model.params);
  } catch (const Error& e) {
    throw ParseError(source, 0, e.what());
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open checkpoint");
  return load_checkpoint(in, file.string());
}

void check_forest(const Checkpoint& checkpoint, const TypeForest& forest) {
  if (checkpoint.type_names != forest.names()) {
    throw Error("checkpoint was trained on a different type set (" +
                std::to_string(checkpoint.type_names.size()) + " types vs " +
                std::to_string(forest.size()) + ")");
  }
}

}  // namespace nfetc
