#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "convsarc/hyperparams.hpp"
#include "convsarc/input_builder.hpp"

namespace convsarc {

// Identity card for a pretrained encoder.
struct EncoderSpec {
    std::string encoder_id;
    std::uint64_t parameter_count = 0;
    std::size_t vocabulary_size = 0;
    int hidden_width = 0;
};

// Architecture of the bidirectional encoder stack. The tiny-test encoder
// (2 layers, width 32, 2 heads, small vocabulary) runs the full pipeline
// in seconds; larger encoders are the same structure scaled up.
struct EncoderConfig {
    std::size_t vocab_size = 1000;
    int d_model = 32;
    int n_heads = 2;
    int n_layers = 2;
    int d_ff = 64;
    int max_positions = 512;
    double head_dropout = 0.1;
};

struct AttentionParams {
    Eigen::MatrixXd wq, wk, wv, wo;  // d_model x d_model
    Eigen::VectorXd bq, bk, bv, bo;  // d_model
};

struct LayerParams {
    Eigen::VectorXd ln1_gain, ln1_bias, ln2_gain, ln2_bias;
    AttentionParams attn;
    Eigen::MatrixXd ff_w1;  // d_model x d_ff
    Eigen::VectorXd ff_b1;
    Eigen::MatrixXd ff_w2;  // d_ff x d_model
    Eigen::VectorXd ff_b2;
};

struct EncoderParams {
    Eigen::MatrixXd token_embedding;     // vocab x d_model
    Eigen::MatrixXd position_embedding;  // max_positions x d_model
    std::vector<LayerParams> layers;
    Eigen::VectorXd final_ln_gain, final_ln_bias;
    Eigen::MatrixXd head_w;  // d_model x 2
    Eigen::VectorXd head_b;  // 2

    static EncoderParams zeros(const EncoderConfig& config);
};

// Flat view over every tensor in a fixed order; used by the optimizer and
// the checkpoint serializer.
struct TensorRef {
    std::string name;
    double* data;
    Eigen::Index rows;
    Eigen::Index cols;
    Eigen::Index size() const { return rows * cols; }
};
std::vector<TensorRef> tensor_refs(EncoderParams& p);
std::uint64_t parameter_count(const EncoderConfig& config);

// Yields initial weights for an encoder id. Anything that would fetch
// pretrained weights from the network or disk lives behind this boundary.
class WeightProvider {
public:
    virtual ~WeightProvider() = default;
    virtual EncoderParams provide(const EncoderConfig& config, std::uint64_t seed) = 0;
};

// Seeded random initialization for the tiny-test encoder.
class TinyTestWeightProvider final : public WeightProvider {
public:
    EncoderParams provide(const EncoderConfig& config, std::uint64_t seed) override;
};

// Loads a serialized weights file (the checkpoint weight format).
class FileWeightProvider final : public WeightProvider {
public:
    explicit FileWeightProvider(std::string path) : path_(std::move(path)) {}
    EncoderParams provide(const EncoderConfig& config, std::uint64_t seed) override;

private:
    std::string path_;
};

// encoder_id registry: "tiny-test" is built in; other ids need a weights
// file. Returns the spec + config pair for a known id.
std::pair<EncoderSpec, EncoderConfig> lookup_encoder(const std::string& encoder_id,
                                                     std::size_t tokenizer_vocab);
std::unique_ptr<WeightProvider> make_weight_provider(const std::string& encoder_id,
                                                     const std::string& weights_path = "");

// One training example: the unpadded token ids plus the class label
// (-1 when unlabeled).
struct Example {
    std::vector<TokenId> ids;
    int label = -1;
};
Example to_example(const DatasetEntry& entry);

// The encoder stack with a two-class head. Forward/backward run in double
// precision; all randomness flows through explicitly seeded Rng state so
// runs are reproducible.
class TinyEncoder {
public:
    TinyEncoder(EncoderConfig config, EncoderParams params);

    const EncoderConfig& config() const { return config_; }
    EncoderParams& params() { return params_; }
    const EncoderParams& params() const { return params_; }

    // Evaluation-mode probability of class 1 (dropout disabled).
    double prob_class1(const std::vector<TokenId>& ids) const;

    // Mean cross-entropy over the batch, eval mode. Used by the finite-
    // difference checks.
    double batch_loss(const std::vector<Example>& batch) const;

    // Mean cross-entropy plus parameter gradients. dropout_rng non-null
    // enables head dropout (training mode).
    double loss_and_gradients(const std::vector<Example>& batch,
                              EncoderParams& grads,
                              class Rng* dropout_rng = nullptr) const;

    // First-position pooled representation, eval mode.
    Eigen::VectorXd pooled(const std::vector<TokenId>& ids) const;

private:
    EncoderConfig config_;
    EncoderParams params_;
};

// dropout -> affine map -> two logits. Deterministic when dropout_rng is
// null (evaluation mode).
Eigen::Vector2d classification_head_forward(const Eigen::VectorXd& pooled,
                                            const Eigen::MatrixXd& head_w,
                                            const Eigen::VectorXd& head_b,
                                            double dropout_rate = 0.0,
                                            class Rng* dropout_rng = nullptr);

Eigen::Vector2d softmax2(const Eigen::Vector2d& logits);

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_f1 = 0.0;
};

struct TrainedModel {
    EncoderSpec spec;
    EncoderConfig config;
    EncoderParams params;
    std::vector<EpochStats> history;
    Hyperparams hyperparams;
    // input construction the model was trained with; evaluate/predict
    // rebuild inputs the same way
    InputMode mode = InputMode::ResponseOnly;
    int context_turns = 2;
};

// AdamW fine-tuning: decoupled weight decay, default moments, constant
// learning rate, no warmup. Runs exactly hp.epochs epochs and records
// (train loss, validation loss, validation macro F1) per epoch.
TrainedModel fine_tune(const EncoderSpec& spec, const EncoderConfig& config,
                       const EncodedDataset& train, const EncodedDataset& val,
                       const Hyperparams& hp, WeightProvider& provider);

struct Prediction {
    double prob_sarcasm = 0.0;
    int label = 0;  // 1 iff prob_sarcasm >= 0.5
};

std::vector<Prediction> predict(const TrainedModel& model, const EncodedDataset& inputs);

}  // namespace convsarc
