#include <doctest.h>

#include <cmath>

#include "convsarc/checkpoint.hpp"
#include "convsarc/encoder.hpp"
#include "convsarc/errors.hpp"
#include "convsarc/rng.hpp"
#include "convsarc/tokenizer.hpp"
#include "test_support.hpp"

using namespace convsarc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

EncoderConfig small_config(std::size_t vocab = 101) {
    EncoderConfig cfg;
    cfg.vocab_size = vocab;
    cfg.d_model = 16;
    cfg.n_heads = 2;
    cfg.n_layers = 2;
    cfg.d_ff = 24;
    cfg.max_positions = 64;
    return cfg;
}

std::vector<Example> random_batch(Rng& rng, const EncoderConfig& cfg, std::size_t n) {
    std::vector<Example> batch;
    for (std::size_t i = 0; i < n; ++i) {
        Example ex;
        std::size_t len = 3 + rng.next_below(10);
        for (std::size_t j = 0; j < len; ++j) {
            ex.ids.push_back(static_cast<TokenId>(4 + rng.next_below(cfg.vocab_size - 4)));
        }
        ex.label = static_cast<int>(rng.next_below(2));
        batch.push_back(std::move(ex));
    }
    return batch;
}

EncodedDataset make_dataset(const Corpus& corpus, InputMode mode,
                            const TokenizerHandle& tok, const Hyperparams& hp) {
    return build_dataset(corpus, mode, tok, hp);
}

double fd_gradient(TinyEncoder& model, double* param,
                   const std::vector<Example>& batch, double eps = 1e-5) {
    double saved = *param;
    *param = saved + eps;
    double up = model.batch_loss(batch);
    *param = saved - eps;
    double down = model.batch_loss(batch);
    *param = saved;
    return (up - down) / (2.0 * eps);
}

}  // namespace

TEST_CASE("classification head: zero weights yield the bias") {
    MatrixXd w = MatrixXd::Zero(8, 2);
    VectorXd b(2);
    b << 0.3, -0.7;
    VectorXd pooled = VectorXd::Random(8);
    Eigen::Vector2d logits = classification_head_forward(pooled, w, b);
    CHECK(logits(0) == doctest::Approx(0.3));
    CHECK(logits(1) == doctest::Approx(-0.7));
}

TEST_CASE("classification head: identity map on width 2") {
    MatrixXd w = MatrixXd::Identity(2, 2);
    VectorXd b = VectorXd::Zero(2);
    VectorXd pooled(2);
    pooled << 3.0, 1.0;
    Eigen::Vector2d logits = classification_head_forward(pooled, w, b);
    CHECK(logits(0) == doctest::Approx(3.0));
    CHECK(logits(1) == doctest::Approx(1.0));
}

TEST_CASE("classification head rejects a width mismatch") {
    MatrixXd w = MatrixXd::Zero(8, 2);
    VectorXd b = VectorXd::Zero(2);
    CHECK_THROWS_AS(classification_head_forward(VectorXd::Zero(5), w, b),
                    RuntimeFailure);
}

TEST_CASE("softmax of random logits sums to 1") {
    Rng rng(81);
    for (int i = 0; i < 100; ++i) {
        Eigen::Vector2d logits(rng.next_normal() * 5, rng.next_normal() * 5);
        Eigen::Vector2d p = softmax2(logits);
        CHECK(std::abs(p.sum() - 1.0) < 1e-9);
        CHECK(p.minCoeff() >= 0.0);
    }
}

TEST_CASE("head gradients match central finite differences") {
    EncoderConfig cfg = small_config();
    TinyTestWeightProvider provider;
    TinyEncoder model(cfg, provider.provide(cfg, 5));
    Rng rng(91);

    for (int trial = 0; trial < 5; ++trial) {
        auto batch = random_batch(rng, cfg, 4);
        EncoderParams grads = EncoderParams::zeros(cfg);
        model.loss_and_gradients(batch, grads);

        for (Eigen::Index i = 0; i < model.params().head_w.size(); ++i) {
            double analytic = grads.head_w.data()[i];
            double fd = fd_gradient(model, model.params().head_w.data() + i, batch);
            double denom = std::max({std::abs(analytic), std::abs(fd), 1e-8});
            CHECK(std::abs(analytic - fd) / denom < 1e-4);
        }
        for (Eigen::Index i = 0; i < 2; ++i) {
            double analytic = grads.head_b(i);
            double fd = fd_gradient(model, model.params().head_b.data() + i, batch);
            double denom = std::max({std::abs(analytic), std::abs(fd), 1e-8});
            CHECK(std::abs(analytic - fd) / denom < 1e-4);
        }
    }
}

TEST_CASE("backbone gradients spot-checked against finite differences") {
    EncoderConfig cfg = small_config();
    TinyTestWeightProvider provider;
    TinyEncoder model(cfg, provider.provide(cfg, 6));
    Rng rng(93);
    auto batch = random_batch(rng, cfg, 3);

    EncoderParams grads = EncoderParams::zeros(cfg);
    model.loss_and_gradients(batch, grads);

    auto p_refs = tensor_refs(model.params());
    auto g_refs = tensor_refs(grads);
    for (std::size_t t = 0; t < p_refs.size(); ++t) {
        // a few entries per tensor keeps the FD pass fast
        for (Eigen::Index i = 0; i < std::min<Eigen::Index>(p_refs[t].size(), 3); ++i) {
            Eigen::Index idx = i * (p_refs[t].size() / 3 > 0 ? p_refs[t].size() / 3 : 1);
            if (idx >= p_refs[t].size()) idx = p_refs[t].size() - 1;
            double analytic = g_refs[t].data[idx];
            double fd = fd_gradient(model, p_refs[t].data + idx, batch);
            double denom = std::max({std::abs(analytic), std::abs(fd), 1e-6});
            CAPTURE(p_refs[t].name);
            CHECK(std::abs(analytic - fd) / denom < 1e-3);
        }
    }
}

TEST_CASE("fine_tune records one history entry per epoch") {
    auto tok = make_tokenizer(300);
    Corpus c = testing::separable_corpus(12);
    Hyperparams hp;
    hp.epochs = 3;
    hp.learning_rate = 1e-3;
    hp.batch_size = 4;
    auto [spec, cfg] = lookup_encoder("tiny-test", tok->vocabulary_size());
    auto ds = make_dataset(c, InputMode::ResponseOnly, *tok, hp);
    TinyTestWeightProvider provider;
    TrainedModel model = fine_tune(spec, cfg, ds, ds, hp, provider);
    CHECK(model.history.size() == 3);
    for (const auto& e : model.history) CHECK(std::isfinite(e.train_loss));
}

TEST_CASE("overfit smoke: separable records reach training accuracy 1.0") {
    auto tok = make_tokenizer(300);
    Corpus c = testing::separable_corpus(16);
    Hyperparams hp;
    hp.epochs = 20;
    hp.learning_rate = 1e-3;
    hp.batch_size = 8;
    auto [spec, cfg] = lookup_encoder("tiny-test", tok->vocabulary_size());
    auto ds = make_dataset(c, InputMode::ResponseOnly, *tok, hp);
    TinyTestWeightProvider provider;
    TrainedModel model = fine_tune(spec, cfg, ds, ds, hp, provider);

    CHECK(model.history.back().train_loss < model.history.front().train_loss);

    auto preds = predict(model, ds);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        CHECK(preds[i].label == *ds[i].label);
    }
}

TEST_CASE("fine_tune is deterministic for a fixed seed") {
    auto tok = make_tokenizer(300);
    Corpus c = testing::separable_corpus(12);
    Hyperparams hp;
    hp.epochs = 3;
    hp.learning_rate = 1e-3;
    hp.batch_size = 4;
    hp.seed = 77;
    auto [spec, cfg] = lookup_encoder("tiny-test", tok->vocabulary_size());
    auto ds = make_dataset(c, InputMode::ContextResponseSeparated, *tok, hp);
    TinyTestWeightProvider provider;
    TrainedModel a = fine_tune(spec, cfg, ds, ds, hp, provider);
    TrainedModel b = fine_tune(spec, cfg, ds, ds, hp, provider);

    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].val_loss == b.history[i].val_loss);
        CHECK(a.history[i].val_f1 == b.history[i].val_f1);
    }
    auto ra = tensor_refs(a.params);
    auto rb = tensor_refs(b.params);
    for (std::size_t t = 0; t < ra.size(); ++t) {
        for (Eigen::Index i = 0; i < ra[t].size(); ++i) {
            CHECK(ra[t].data[i] == rb[t].data[i]);
        }
    }
}

TEST_CASE("fine_tune validation errors are distinct") {
    auto tok = make_tokenizer(300);
    Hyperparams hp;
    auto [spec, cfg] = lookup_encoder("tiny-test", tok->vocabulary_size());
    TinyTestWeightProvider provider;

    CHECK_THROWS_AS(fine_tune(spec, cfg, {}, {}, hp, provider), DataError);

    Corpus c = testing::separable_corpus(4);
    auto ds = make_dataset(c, InputMode::ResponseOnly, *tok, hp);
    auto unlabeled = ds;
    unlabeled[1].label.reset();
    CHECK_THROWS_AS(fine_tune(spec, cfg, unlabeled, {}, hp, provider), DataError);

    // ids outside the encoder vocabulary
    auto big_tok = make_tokenizer(5000);
    auto big_ds = make_dataset(c, InputMode::ResponseOnly, *big_tok, hp);
    CHECK_THROWS_AS(fine_tune(spec, cfg, big_ds, {}, hp, provider), RuntimeFailure);
}

TEST_CASE("predict: empty input, probability range, threshold rule") {
    auto tok = make_tokenizer(300);
    Corpus c = testing::separable_corpus(8);
    Hyperparams hp;
    hp.epochs = 1;
    auto [spec, cfg] = lookup_encoder("tiny-test", tok->vocabulary_size());
    auto ds = make_dataset(c, InputMode::ResponseOnly, *tok, hp);
    TinyTestWeightProvider provider;
    TrainedModel model = fine_tune(spec, cfg, ds, ds, hp, provider);

    CHECK(predict(model, {}).empty());
    auto preds = predict(model, ds);
    REQUIRE(preds.size() == ds.size());
    for (const auto& p : preds) {
        CHECK(p.prob_sarcasm >= 0.0);
        CHECK(p.prob_sarcasm <= 1.0);
        CHECK(p.label == (p.prob_sarcasm >= 0.5 ? 1 : 0));
    }

    auto big_tok = make_tokenizer(5000);
    auto big_ds = make_dataset(c, InputMode::ResponseOnly, *big_tok, hp);
    CHECK_THROWS_AS(predict(model, big_ds), RuntimeFailure);
}

TEST_CASE("checkpoint round-trips the full model") {
    auto tok = make_tokenizer(300);
    Corpus c = testing::separable_corpus(8);
    Hyperparams hp;
    hp.epochs = 2;
    hp.seed = 5;
    auto [spec, cfg] = lookup_encoder("tiny-test", tok->vocabulary_size());
    auto ds = make_dataset(c, InputMode::ContextResponse, *tok, hp);
    TinyTestWeightProvider provider;
    TrainedModel model = fine_tune(spec, cfg, ds, ds, hp, provider);
    model.mode = InputMode::ContextResponse;
    model.context_turns = 3;

    auto dir = testing::make_temp_dir("ckpt");
    save_checkpoint(dir, model);
    TrainedModel back = load_checkpoint(dir);

    CHECK(back.spec.encoder_id == "tiny-test");
    CHECK(back.spec.vocabulary_size == model.spec.vocabulary_size);
    CHECK(back.mode == InputMode::ContextResponse);
    CHECK(back.context_turns == 3);
    CHECK(back.hyperparams.seed == 5);
    REQUIRE(back.history.size() == model.history.size());
    CHECK(back.history.back().val_f1 == model.history.back().val_f1);

    auto ra = tensor_refs(model.params);
    auto rb = tensor_refs(back.params);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t t = 0; t < ra.size(); ++t) {
        REQUIRE(ra[t].size() == rb[t].size());
        for (Eigen::Index i = 0; i < ra[t].size(); ++i) {
            CHECK(ra[t].data[i] == rb[t].data[i]);
        }
    }

    // predictions agree in a fresh model object
    auto p1 = predict(model, ds);
    auto p2 = predict(back, ds);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].prob_sarcasm == p2[i].prob_sarcasm);
    }
}

TEST_CASE("load_checkpoint fails cleanly on an incomplete directory") {
    auto dir = testing::make_temp_dir("badckpt");
    CHECK_THROWS_AS(load_checkpoint(dir), RuntimeFailure);
}

TEST_CASE("encoder registry and weight providers") {
    auto [tiny_spec, tiny_cfg] = lookup_encoder("tiny-test", 300);
    CHECK(tiny_spec.vocabulary_size == 300);
    CHECK(tiny_spec.hidden_width == 32);
    CHECK(tiny_spec.parameter_count == parameter_count(tiny_cfg));
    CHECK(tiny_spec.parameter_count < 200000);

    auto [rl_spec, rl_cfg] = lookup_encoder("roberta-large", 300);
    CHECK(rl_spec.parameter_count == 355000000);
    CHECK(rl_spec.vocabulary_size == 50265);
    CHECK(rl_cfg.n_layers == 24);

    CHECK_THROWS_AS(lookup_encoder("bert-base", 300), ConfigError);
    CHECK_THROWS_AS(make_weight_provider("roberta-large"), ConfigError);
    CHECK(make_weight_provider("tiny-test") != nullptr);
}

TEST_CASE("tiny-test initialization is seed-deterministic") {
    EncoderConfig cfg = small_config();
    TinyTestWeightProvider provider;
    EncoderParams a = provider.provide(cfg, 9);
    EncoderParams b = provider.provide(cfg, 9);
    EncoderParams c = provider.provide(cfg, 10);
    CHECK(a.token_embedding == b.token_embedding);
    CHECK(a.token_embedding != c.token_embedding);
    CHECK(a.layers[0].ln1_gain.isOnes());
    CHECK(a.layers[0].attn.bq.isZero());
}
