#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nfetc/autodiff.hpp"
#include "nfetc/corpus.hpp"
#include "nfetc/embeddings.hpp"
#include "nfetc/param_set.hpp"
#include "nfetc/random.hpp"

namespace nfetc {

struct ModelConfig {
  std::size_t word_dim = 300;      // d_w, fixed by the embedding file
  std::size_t position_dim = 85;   // d_p
  std::size_t hidden_dim = 180;    // d_s
  std::size_t num_types = 0;       // K
  std::size_t window = 10;         // C
  bool mention_positions = false;  // feed position vectors to the mention LSTM
  bool mention_dropout = true;     // apply LSTM dropout to the mention LSTM too

  std::size_t context_input_dim() const { return word_dim + position_dim; }
  std::size_t mention_input_dim() const { return word_dim + (mention_positions ? position_dim : 0); }
  // dim(R) = dim(r_c) + dim(r_a) + dim(r_l)
  std::size_t feature_dim() const { return 2 * hidden_dim + word_dim; }

  bool operator==(const ModelConfig&) const = default;
};

namespace param {
inline const std::string context_fw_weight = "context.forward.weight";
inline const std::string context_fw_bias = "context.forward.bias";
inline const std::string context_bw_weight = "context.backward.weight";
inline const std::string context_bw_bias = "context.backward.bias";
inline const std::string mention_weight = "mention.weight";
inline const std::string mention_bias = "mention.bias";
inline const std::string attention = "attention.w";
inline const std::string positions = "position.table";
inline const std::string classifier_weight = "classifier.weight";
inline const std::string classifier_bias = "classifier.bias";
}  // namespace param

/// Fresh trainable parameters. LSTM weights are [4d, in + d] with gate blocks
/// ordered input, forget, output, candidate; recurrent blocks start orthogonal
/// and the forget-gate bias starts at 1.
ParamSet init_params(const ModelConfig& config, Rng& rng);

/// Checks every parameter shape against `config`.
void validate_params(const ModelConfig& config, const ParamSet& params);

enum class Mode { train, infer };

/// Input/output dropout for LSTM layers. Inactive unless a generator is given.
class LstmDropout {
 public:
  LstmDropout() = default;
  LstmDropout(Rng* rng, double input_keep, double output_keep)
      : rng_(rng), input_keep_(input_keep), output_keep_(output_keep) {}

  Var input(Var x) const { return apply(x, input_keep_); }
  Var output(Var h) const { return apply(h, output_keep_); }
  bool active() const { return rng_ != nullptr; }

 private:
  Var apply(Var v, double keep) const;

  Rng* rng_ = nullptr;
  double input_keep_ = 1.0;
  double output_keep_ = 1.0;
};

struct LstmWeights {
  Var weight;
  Var bias;
};

/// Runs a unidirectional LSTM over `inputs` from zero state and returns the
/// (dropout-applied) output at every step.
std::vector<Var> lstm_sequence(const LstmWeights& lstm, std::span<const Var> inputs,
                               std::size_t hidden_dim, const LstmDropout& dropout);

/// H = [fw_1 + bw_1, ..., fw_T + bw_T] as a [d_s, T] matrix.
Var bilstm_context(std::span<const Var> inputs, const LstmWeights& forward,
                   const LstmWeights& backward, std::size_t hidden_dim, const LstmDropout& fw_dropout,
                   const LstmDropout& bw_dropout);

struct AttentionOutput {
  Var weights;  // alpha, length T
  Var context;  // r_c, length d_s
};

/// G = tanh(H), alpha = softmax(w^T G), r_c = H alpha.
AttentionOutput attention(Var H, Var w);

/// Mean of the mention's word vectors.
Var mention_average(std::span<const Var> word_vectors);

/// Last output of a left-to-right LSTM over the extended mention.
Var mention_lstm(std::span<const Var> extended_mention, const LstmWeights& lstm,
                 std::size_t hidden_dim, const LstmDropout& dropout);

/// Logits W R + b.
Var classify(Var features, Var weight, Var bias);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

struct ForwardTrace {
  Var H;
  Var attention_weights;
  Var context;          // r_c
  Var mention_average;  // r_a
  Var mention_lstm;     // r_l
  Var features;         // R
  Var logits;
  Var probabilities;    // p-hat

  std::vector<double> distribution() const;
  TypeId predicted() const;
};

/// Full forward pass for one (windowed) mention. In train mode `rng` drives
/// dropout and must be non-null; infer mode is deterministic.
ForwardTrace forward(const BoundParams& params, const ModelConfig& config,
                     const WordEmbeddings& embeddings, const MentionTriple& mention, Mode mode,
                     Rng* rng = nullptr, double input_keep = 1.0, double output_keep = 1.0);

/// Model parameters plus the configuration they were built for.
struct NfetcModel {
  ModelConfig config;
  ParamSet params;

  static NfetcModel create(const ModelConfig& config, std::uint64_t seed);

  // Inference-mode distributions, one per mention.
  std::vector<std::vector<double>> predict_proba(const WordEmbeddings& embeddings,
                                                 std::span<const MentionTriple> mentions) const;
  std::vector<TypeId> predict(const WordEmbeddings& embeddings,
                              std::span<const MentionTriple> mentions) const;
};

}  // namespace nfetc
