#include "nfetc/model.hpp"

#include <algorithm>
#include <cmath>

#include "nfetc/error.hpp"

namespace nfetc {

namespace {

// Rows of a Gaussian matrix, orthonormalised with modified Gram-Schmidt.
std::vector<double> orthogonal(std::size_t n, Rng& rng) {
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    while (norm < 1e-6) {
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] = rng.normal();
      for (std::size_t k = 0; k < i; ++k) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += m[i * n + j] * m[k * n + j];
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] -= dot * m[k * n + j];
      }
      norm = 0.0;
      for (std::size_t j = 0; j < n; ++j) norm += m[i * n + j] * m[i * n + j];
      norm = std::sqrt(norm);
    }
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] /= norm;
  }
  return m;
}

void init_lstm(ParamSet& params, const std::string& weight_name, const std::string& bias_name,
               std::size_t input_dim, std::size_t hidden, Rng& rng) {
  Tensor weight({4 * hidden, input_dim + hidden});
  const double limit = std::sqrt(6.0 / static_cast<double>(input_dim + hidden));
  for (std::size_t gate = 0; gate < 4; ++gate) {
    for (std::size_t r = 0; r < hidden; ++r) {
      for (std::size_t c = 0; c < input_dim; ++c) {
        weight.at(gate * hidden + r, c) = rng.uniform(-limit, limit);
      }
    }
    const auto recurrent = orthogonal(hidden, rng);
    for (std::size_t r = 0; r < hidden; ++r) {
      for (std::size_t c = 0; c < hidden; ++c) {
        weight.at(gate * hidden + r, input_dim + c) = recurrent[r * hidden + c];
      }
    }
  }
  Tensor bias({4 * hidden}, 0.0);
  for (std::size_t r = hidden; r < 2 * hidden; ++r) bias[r] = 1.0;
  params.add(weight_name, std::move(weight));
  params.add(bias_name, std::move(bias));
}

void expect_shape(const ParamSet& params, const std::string& name, const Shape& shape) {
  if (!params.contains(name)) throw Error("missing parameter '" + name + "'");
  const Tensor& t = params.get(name);
  if (t.shape() != shape) {
    throw ShapeError("parameter '" + name + "' has shape " + shape_string(t.shape()) +
                     ", configuration expects " + shape_string(shape));
  }
}

Var constant_vector(Tape& tape, std::span<const double> values) {
  return tape.constant(Tensor::vector({values.begin(), values.end()}));
}

}  // namespace

ParamSet init_params(const ModelConfig& config, Rng& rng) {
  if (config.word_dim == 0 || config.position_dim == 0 || config.hidden_dim == 0 ||
      config.num_types == 0 || config.window == 0) {
    throw Error("model dimensions must be positive");
  }
  const std::size_t d = config.hidden_dim;
  ParamSet params;
  init_lstm(params, param::context_fw_weight, param::context_fw_bias, config.context_input_dim(), d,
            rng);
  init_lstm(params, param::context_bw_weight, param::context_bw_bias, config.context_input_dim(), d,
            rng);
  init_lstm(params, param::mention_weight, param::mention_bias, config.mention_input_dim(), d, rng);

  Tensor w({d});
  const double attention_limit = std::sqrt(3.0 / static_cast<double>(d));
  for (double& v : w.values()) v = rng.uniform(-attention_limit, attention_limit);
  params.add(param::attention, std::move(w));

  params.add(param::positions, init_position_table(config.window, config.position_dim, rng));

  const std::size_t k = config.num_types, f = config.feature_dim();
  Tensor classifier({k, f});
  const double limit = std::sqrt(6.0 / static_cast<double>(k + f));
  for (double& v : classifier.values()) v = rng.uniform(-limit, limit);
  params.add(param::classifier_weight, std::move(classifier));
  params.add(param::classifier_bias, Tensor({k}, 0.0));
  return params;
}

void validate_params(const ModelConfig& config, const ParamSet& params) {
  const std::size_t d = config.hidden_dim;
  expect_shape(params, param::context_fw_weight, {4 * d, config.context_input_dim() + d});
  expect_shape(params, param::context_fw_bias, {4 * d});
  expect_shape(params, param::context_bw_weight, {4 * d, config.context_input_dim() + d});
  expect_shape(params, param::context_bw_bias, {4 * d});
  expect_shape(params, param::mention_weight, {4 * d, config.mention_input_dim() + d});
  expect_shape(params, param::mention_bias, {4 * d});
  expect_shape(params, param::attention, {d});
  expect_shape(params, param::positions, {position_table_rows(config.window), config.position_dim});
  expect_shape(params, param::classifier_weight, {config.num_types, config.feature_dim()});
  expect_shape(params, param::classifier_bias, {config.num_types});
}

Var LstmDropout::apply(Var v, double keep) const {
  if (!rng_ || keep == 1.0) return v;
  Var mask = v.tape().constant(dropout_mask(v.shape(), keep, *rng_));
  return mul(v, mask);
}

std::vector<Var> lstm_sequence(const LstmWeights& lstm, std::span<const Var> inputs,
                               std::size_t hidden_dim, const LstmDropout& dropout) {
  if (inputs.empty()) throw ShapeError("LSTM over an empty sequence");
  Tape& tape = lstm.weight.tape();
  const std::size_t d = hidden_dim;
  const std::size_t input_dim = lstm.weight.value().cols() - d;
  Var h = tape.constant(Tensor({d}, 0.0));
  Var c = tape.constant(Tensor({d}, 0.0));
  std::vector<Var> outputs;
  outputs.reserve(inputs.size());
  for (const Var& raw : inputs) {
    if (raw.size() != input_dim) {
      throw ShapeError("LSTM input has " + std::to_string(raw.size()) + " values, expected " +
                       std::to_string(input_dim));
    }
    Var x = dropout.input(raw);
    Var joined[] = {x, h};
    Var gates = add(matmul(lstm.weight, concat(joined)), lstm.bias);
    Var in_gate = sigmoid(slice(gates, 0, d));
    Var forget_gate = sigmoid(slice(gates, d, d));
    Var out_gate = sigmoid(slice(gates, 2 * d, d));
    Var candidate = tanh(slice(gates, 3 * d, d));
    c = add(mul(forget_gate, c), mul(in_gate, candidate));
    h = mul(out_gate, tanh(c));
    outputs.push_back(dropout.output(h));
  }
  return outputs;
}

Var bilstm_context(std::span<const Var> inputs, const LstmWeights& forward,
                   const LstmWeights& backward, std::size_t hidden_dim, const LstmDropout& fw_dropout,
                   const LstmDropout& bw_dropout) {
  const auto fw = lstm_sequence(forward, inputs, hidden_dim, fw_dropout);
  std::vector<Var> reversed(inputs.rbegin(), inputs.rend());
  auto bw = lstm_sequence(backward, reversed, hidden_dim, bw_dropout);
  std::reverse(bw.begin(), bw.end());
  std::vector<Var> columns;
  columns.reserve(fw.size());
  for (std::size_t i = 0; i < fw.size(); ++i) columns.push_back(add(fw[i], bw[i]));
  return stack_columns(columns);
}

AttentionOutput attention(Var H, Var w) {
  if (H.value().rank() != 2 || H.value().rows() != w.size()) {
    throw ShapeError("attention: H is " + shape_string(H.shape()) + ", w is " +
                     shape_string(w.shape()));
  }
  Var G = tanh(H);
  Var alpha = softmax(matmul(transpose(G), w));
  return {alpha, matmul(H, alpha)};
}

Var mention_average(std::span<const Var> word_vectors) {
  if (word_vectors.empty()) throw ShapeError("empty mention");
  return scale(add_n(word_vectors), 1.0 / static_cast<double>(word_vectors.size()));
}

Var mention_lstm(std::span<const Var> extended_mention, const LstmWeights& lstm,
                 std::size_t hidden_dim, const LstmDropout& dropout) {
  return lstm_sequence(lstm, extended_mention, hidden_dim, dropout).back();
}

Var classify(Var features, Var weight, Var bias) { return add(matmul(weight, features), bias); }

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ShapeError("argmax of an empty vector");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<double> ForwardTrace::distribution() const {
  const auto v = probabilities.value().values();
  return {v.begin(), v.end()};
}

TypeId ForwardTrace::predicted() const { return argmax(probabilities.value().values()); }

ForwardTrace forward(const BoundParams& params, const ModelConfig& config,
                     const WordEmbeddings& embeddings, const MentionTriple& mention, Mode mode,
                     Rng* rng, double input_keep, double output_keep) {
  if (embeddings.dim() != config.word_dim) {
    throw ShapeError("embedding dimension " + std::to_string(embeddings.dim()) +
                     " does not match model word_dim " + std::to_string(config.word_dim));
  }
  const std::size_t T = mention.tokens.size();
  if (T == 0 || mention.begin >= mention.end || mention.end > T) throw Error("invalid mention span");
  if (mode == Mode::train && !rng) throw Error("train mode needs a dropout generator");

  Var positions = params[param::positions];
  Tape& tape = positions.tape();

  std::vector<Var> words(T);
  std::vector<Var> inputs(T);
  for (std::size_t i = 0; i < T; ++i) {
    words[i] = constant_vector(tape, embeddings.lookup(mention.tokens[i]));
    const std::size_t r =
        position_row(relative_distance(i, mention.begin, mention.end), config.window);
    Var parts[] = {words[i], row(positions, r)};
    inputs[i] = concat(parts);
  }

  Rng* dropout_rng = mode == Mode::train ? rng : nullptr;
  const LstmDropout context_dropout(dropout_rng, input_keep, output_keep);
  const LstmDropout mention_dropout(config.mention_dropout ? dropout_rng : nullptr, input_keep,
                                    output_keep);

  ForwardTrace trace;
  trace.H = bilstm_context(inputs, {params[param::context_fw_weight], params[param::context_fw_bias]},
                           {params[param::context_bw_weight], params[param::context_bw_bias]},
                           config.hidden_dim, context_dropout, context_dropout);
  auto att = attention(trace.H, params[param::attention]);
  trace.attention_weights = att.weights;
  trace.context = att.context;

  trace.mention_average = mention_average(
      std::span<const Var>(words).subspan(mention.begin, mention.end - mention.begin));

  std::vector<Var> extended;
  const auto first = static_cast<std::ptrdiff_t>(mention.begin) - 1;
  const auto last = static_cast<std::ptrdiff_t>(mention.end);
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const bool inside = i >= 0 && i < static_cast<std::ptrdiff_t>(T);
    Var word = inside ? words[static_cast<std::size_t>(i)]
                      : constant_vector(tape, embeddings.lookup(std::string_view{}));
    if (!config.mention_positions) {
      extended.push_back(word);
      continue;
    }
    const std::size_t r =
        inside ? position_row(relative_distance(static_cast<std::size_t>(i), mention.begin, mention.end),
                              config.window)
               : pad_position_row(config.window);
    Var parts[] = {word, row(positions, r)};
    extended.push_back(concat(parts));
  }
  trace.mention_lstm = mention_lstm(extended, {params[param::mention_weight], params[param::mention_bias]},
                                    config.hidden_dim, mention_dropout);

  Var parts[] = {trace.context, trace.mention_average, trace.mention_lstm};
  trace.features = concat(parts);
  trace.logits = classify(trace.features, params[param::classifier_weight],
                          params[param::classifier_bias]);
  trace.probabilities = softmax(trace.logits);
  return trace;
}

NfetcModel NfetcModel::create(const ModelConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return NfetcModel{config, init_params(config, rng)};
}

std::vector<std::vector<double>> NfetcModel::predict_proba(
    const WordEmbeddings& embeddings, std::span<const MentionTriple> mentions) const {
  constexpr std::size_t chunk = 256;
  std::vector<std::vector<double>> out;
  out.reserve(mentions.size());
  ParamSet frozen = params;
  for (auto& e : frozen.entries()) e.trainable = false;
  for (std::size_t start = 0; start < mentions.size(); start += chunk) {
    Tape tape;
    BoundParams bound(tape, frozen);
    const std::size_t stop = std::min(mentions.size(), start + chunk);
    for (std::size_t i = start; i < stop; ++i) {
      out.push_back(forward(bound, config, embeddings, mentions[i], Mode::infer).distribution());
    }
  }
  return out;
}

std::vector<TypeId> NfetcModel::predict(const WordEmbeddings& embeddings,
                                        std::span<const MentionTriple> mentions) const {
  std::vector<TypeId> out;
  for (const auto& p : predict_proba(embeddings, mentions)) out.push_back(argmax(p));
  return out;
}

}  // namespace nfetc
