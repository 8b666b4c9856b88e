#include "convsarc/encoder.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "convsarc/errors.hpp"
#include "convsarc/metrics.hpp"
#include "convsarc/rng.hpp"
#include "convsarc/weights_io.hpp"

namespace convsarc {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

constexpr double kLnEps = 1e-5;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) +
           x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

struct LnCache {
    MatrixXd xhat;
    VectorXd inv_sigma;
};

MatrixXd layernorm(const MatrixXd& x, const VectorXd& gain, const VectorXd& bias,
                   LnCache& cache) {
    const Eigen::Index m = x.rows(), d = x.cols();
    cache.xhat.resize(m, d);
    cache.inv_sigma.resize(m);
    MatrixXd y(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        double mu = x.row(i).mean();
        double var = (x.row(i).array() - mu).square().mean();
        double inv = 1.0 / std::sqrt(var + kLnEps);
        cache.inv_sigma(i) = inv;
        cache.xhat.row(i) = (x.row(i).array() - mu) * inv;
        y.row(i) = cache.xhat.row(i).cwiseProduct(gain.transpose()) + bias.transpose();
    }
    return y;
}

MatrixXd layernorm_backward(const MatrixXd& dy, const LnCache& cache,
                            const VectorXd& gain, VectorXd& dgain, VectorXd& dbias) {
    const Eigen::Index m = dy.rows(), d = dy.cols();
    MatrixXd dx(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        dgain += dy.row(i).cwiseProduct(cache.xhat.row(i)).transpose();
        dbias += dy.row(i).transpose();
        Eigen::RowVectorXd dxhat = dy.row(i).cwiseProduct(gain.transpose());
        double mean_dxhat = dxhat.mean();
        double mean_dxhat_xhat = dxhat.cwiseProduct(cache.xhat.row(i)).mean();
        dx.row(i) = cache.inv_sigma(i) *
                    (dxhat.array() - mean_dxhat -
                     cache.xhat.row(i).array() * mean_dxhat_xhat);
    }
    return dx;
}

struct LayerCache {
    MatrixXd x_in;
    LnCache ln1;
    MatrixXd xn1, q, k, v, c;
    std::vector<MatrixXd> attn;  // per-head softmax weights
    MatrixXd x_mid;
    LnCache ln2;
    MatrixXd xn2, z, h;
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    MatrixXd x_out;
    LnCache ln_final;
    MatrixXd y;
    VectorXd pooled;
    VectorXd dropout_mask;  // empty in eval mode
    Vector2d logits;
    Vector2d probs;
};

MatrixXd softmax_rows(const MatrixXd& s) {
    MatrixXd a(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        Eigen::RowVectorXd row = s.row(i).array() - s.row(i).maxCoeff();
        row = row.array().exp();
        a.row(i) = row / row.sum();
    }
    return a;
}

}  // namespace

Vector2d softmax2(const Vector2d& logits) {
    double m = logits.maxCoeff();
    Vector2d e = (logits.array() - m).exp();
    return e / e.sum();
}

Vector2d classification_head_forward(const VectorXd& pooled, const MatrixXd& head_w,
                                     const VectorXd& head_b, double dropout_rate,
                                     Rng* dropout_rng) {
    if (pooled.size() != head_w.rows()) {
        throw RuntimeFailure("pooled width " + std::to_string(pooled.size()) +
                             " does not match head width " +
                             std::to_string(head_w.rows()));
    }
    VectorXd x = pooled;
    if (dropout_rng != nullptr && dropout_rate > 0.0) {
        double keep = 1.0 - dropout_rate;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x(i) = dropout_rng->next_double() < dropout_rate ? 0.0 : x(i) / keep;
        }
    }
    return head_w.transpose() * x + head_b;
}

EncoderParams EncoderParams::zeros(const EncoderConfig& cfg) {
    EncoderParams p;
    const int d = cfg.d_model;
    p.token_embedding = MatrixXd::Zero(static_cast<Eigen::Index>(cfg.vocab_size), d);
    p.position_embedding = MatrixXd::Zero(cfg.max_positions, d);
    p.layers.resize(static_cast<std::size_t>(cfg.n_layers));
    for (auto& layer : p.layers) {
        layer.ln1_gain = VectorXd::Zero(d);
        layer.ln1_bias = VectorXd::Zero(d);
        layer.ln2_gain = VectorXd::Zero(d);
        layer.ln2_bias = VectorXd::Zero(d);
        layer.attn.wq = MatrixXd::Zero(d, d);
        layer.attn.wk = MatrixXd::Zero(d, d);
        layer.attn.wv = MatrixXd::Zero(d, d);
        layer.attn.wo = MatrixXd::Zero(d, d);
        layer.attn.bq = VectorXd::Zero(d);
        layer.attn.bk = VectorXd::Zero(d);
        layer.attn.bv = VectorXd::Zero(d);
        layer.attn.bo = VectorXd::Zero(d);
        layer.ff_w1 = MatrixXd::Zero(d, cfg.d_ff);
        layer.ff_b1 = VectorXd::Zero(cfg.d_ff);
        layer.ff_w2 = MatrixXd::Zero(cfg.d_ff, d);
        layer.ff_b2 = VectorXd::Zero(d);
    }
    p.final_ln_gain = VectorXd::Zero(d);
    p.final_ln_bias = VectorXd::Zero(d);
    p.head_w = MatrixXd::Zero(d, 2);
    p.head_b = VectorXd::Zero(2);
    return p;
}

std::vector<TensorRef> tensor_refs(EncoderParams& p) {
    std::vector<TensorRef> refs;
    auto add_m = [&](const std::string& name, MatrixXd& m) {
        refs.push_back({name, m.data(), m.rows(), m.cols()});
    };
    auto add_v = [&](const std::string& name, VectorXd& v) {
        refs.push_back({name, v.data(), v.size(), 1});
    };
    add_m("token_embedding", p.token_embedding);
    add_m("position_embedding", p.position_embedding);
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        std::string prefix = "layer" + std::to_string(i) + ".";
        auto& l = p.layers[i];
        add_v(prefix + "ln1_gain", l.ln1_gain);
        add_v(prefix + "ln1_bias", l.ln1_bias);
        add_m(prefix + "attn.wq", l.attn.wq);
        add_v(prefix + "attn.bq", l.attn.bq);
        add_m(prefix + "attn.wk", l.attn.wk);
        add_v(prefix + "attn.bk", l.attn.bk);
        add_m(prefix + "attn.wv", l.attn.wv);
        add_v(prefix + "attn.bv", l.attn.bv);
        add_m(prefix + "attn.wo", l.attn.wo);
        add_v(prefix + "attn.bo", l.attn.bo);
        add_v(prefix + "ln2_gain", l.ln2_gain);
        add_v(prefix + "ln2_bias", l.ln2_bias);
        add_m(prefix + "ff_w1", l.ff_w1);
        add_v(prefix + "ff_b1", l.ff_b1);
        add_m(prefix + "ff_w2", l.ff_w2);
        add_v(prefix + "ff_b2", l.ff_b2);
    }
    add_v("final_ln_gain", p.final_ln_gain);
    add_v("final_ln_bias", p.final_ln_bias);
    add_m("head_w", p.head_w);
    add_v("head_b", p.head_b);
    return refs;
}

std::uint64_t parameter_count(const EncoderConfig& cfg) {
    EncoderParams p = EncoderParams::zeros(cfg);
    std::uint64_t n = 0;
    for (const auto& ref : tensor_refs(p)) n += static_cast<std::uint64_t>(ref.size());
    return n;
}

EncoderParams TinyTestWeightProvider::provide(const EncoderConfig& cfg,
                                              std::uint64_t seed) {
    EncoderParams p = EncoderParams::zeros(cfg);
    Rng rng(seed);
    for (auto& ref : tensor_refs(p)) {
        bool is_gain = ref.name.find("_gain") != std::string::npos;
        bool is_bias = ref.name.find("_bias") != std::string::npos ||
                       ref.name.find(".b") != std::string::npos ||
                       ref.name == "head_b";
        for (Eigen::Index i = 0; i < ref.size(); ++i) {
            if (is_gain) {
                ref.data[i] = 1.0;
            } else if (is_bias) {
                ref.data[i] = 0.0;
            } else {
                ref.data[i] = 0.02 * rng.next_normal();
            }
        }
    }
    return p;
}

EncoderParams FileWeightProvider::provide(const EncoderConfig& cfg, std::uint64_t) {
    EncoderParams p = EncoderParams::zeros(cfg);
    load_weights(path_, p);
    return p;
}

std::pair<EncoderSpec, EncoderConfig> lookup_encoder(const std::string& encoder_id,
                                                     std::size_t tokenizer_vocab) {
    if (encoder_id == "tiny-test") {
        EncoderConfig cfg;
        cfg.vocab_size = tokenizer_vocab;
        EncoderSpec spec{encoder_id, parameter_count(cfg), cfg.vocab_size, cfg.d_model};
        return {spec, cfg};
    }
    if (encoder_id == "roberta-large") {
        EncoderConfig cfg;
        cfg.vocab_size = 50265;
        cfg.d_model = 1024;
        cfg.n_heads = 16;
        cfg.n_layers = 24;
        cfg.d_ff = 4096;
        cfg.max_positions = 514;
        EncoderSpec spec{encoder_id, 355000000, cfg.vocab_size, cfg.d_model};
        return {spec, cfg};
    }
    throw ConfigError("unknown encoder id: '" + encoder_id +
                      "' (known: tiny-test, roberta-large)");
}

std::unique_ptr<WeightProvider> make_weight_provider(const std::string& encoder_id,
                                                     const std::string& weights_path) {
    if (!weights_path.empty()) return std::make_unique<FileWeightProvider>(weights_path);
    if (encoder_id == "tiny-test") return std::make_unique<TinyTestWeightProvider>();
    throw ConfigError("encoder '" + encoder_id +
                      "' needs a pretrained weights file (--weights)");
}

Example to_example(const DatasetEntry& entry) {
    Example ex;
    ex.ids.reserve(entry.input.real_length());
    for (std::size_t i = 0; i < entry.input.token_ids.size(); ++i) {
        if (entry.input.attention_mask[i] == 1) ex.ids.push_back(entry.input.token_ids[i]);
    }
    ex.label = entry.label.value_or(-1);
    return ex;
}

TinyEncoder::TinyEncoder(EncoderConfig config, EncoderParams params)
    : config_(std::move(config)), params_(std::move(params)) {}

namespace {

void forward_example(const EncoderConfig& cfg, const EncoderParams& p,
                     const std::vector<TokenId>& ids, ForwardCache& cache,
                     double dropout_rate, Rng* dropout_rng) {
    const Eigen::Index m = static_cast<Eigen::Index>(ids.size());
    const int d = cfg.d_model;
    const int nh = cfg.n_heads;
    const int dh = d / nh;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    if (m == 0) throw RuntimeFailure("empty token sequence");
    if (m > cfg.max_positions) {
        throw RuntimeFailure("sequence length " + std::to_string(m) +
                             " exceeds encoder positions " +
                             std::to_string(cfg.max_positions));
    }

    MatrixXd x(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        TokenId t = ids[static_cast<std::size_t>(i)];
        if (t < 0 || static_cast<std::size_t>(t) >= cfg.vocab_size) {
            throw RuntimeFailure("token id " + std::to_string(t) +
                                 " outside encoder vocabulary of " +
                                 std::to_string(cfg.vocab_size));
        }
        x.row(i) = p.token_embedding.row(t) + p.position_embedding.row(i);
    }

    cache.layers.resize(p.layers.size());
    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        const auto& l = p.layers[li];
        auto& c = cache.layers[li];
        c.x_in = x;
        c.xn1 = layernorm(c.x_in, l.ln1_gain, l.ln1_bias, c.ln1);

        c.q = (c.xn1 * l.attn.wq).rowwise() + l.attn.bq.transpose();
        c.k = (c.xn1 * l.attn.wk).rowwise() + l.attn.bk.transpose();
        c.v = (c.xn1 * l.attn.wv).rowwise() + l.attn.bv.transpose();

        c.c.resize(m, d);
        c.attn.resize(static_cast<std::size_t>(nh));
        for (int h = 0; h < nh; ++h) {
            auto qh = c.q.middleCols(h * dh, dh);
            auto kh = c.k.middleCols(h * dh, dh);
            auto vh = c.v.middleCols(h * dh, dh);
            MatrixXd s = qh * kh.transpose() * scale;
            c.attn[static_cast<std::size_t>(h)] = softmax_rows(s);
            c.c.middleCols(h * dh, dh) = c.attn[static_cast<std::size_t>(h)] * vh;
        }
        MatrixXd o = (c.c * l.attn.wo).rowwise() + l.attn.bo.transpose();
        c.x_mid = c.x_in + o;

        c.xn2 = layernorm(c.x_mid, l.ln2_gain, l.ln2_bias, c.ln2);
        c.z = (c.xn2 * l.ff_w1).rowwise() + l.ff_b1.transpose();
        c.h = c.z.unaryExpr([](double v) { return gelu(v); });
        x = c.x_mid + ((c.h * l.ff_w2).rowwise() + l.ff_b2.transpose());
    }

    cache.x_out = x;
    cache.y = layernorm(cache.x_out, p.final_ln_gain, p.final_ln_bias, cache.ln_final);
    cache.pooled = cache.y.row(0).transpose();

    VectorXd head_in = cache.pooled;
    if (dropout_rng != nullptr && dropout_rate > 0.0) {
        double keep = 1.0 - dropout_rate;
        cache.dropout_mask.resize(head_in.size());
        for (Eigen::Index i = 0; i < head_in.size(); ++i) {
            cache.dropout_mask(i) =
                dropout_rng->next_double() < dropout_rate ? 0.0 : 1.0 / keep;
        }
        head_in = head_in.cwiseProduct(cache.dropout_mask);
    } else {
        cache.dropout_mask.resize(0);
    }
    cache.logits = p.head_w.transpose() * head_in + p.head_b;
    cache.probs = softmax2(cache.logits);
}

void backward_example(const EncoderConfig& cfg, const EncoderParams& p,
                      const std::vector<TokenId>& ids, const ForwardCache& cache,
                      int label, double weight, EncoderParams& g) {
    const Eigen::Index m = static_cast<Eigen::Index>(ids.size());
    const int d = cfg.d_model;
    const int nh = cfg.n_heads;
    const int dh = d / nh;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Vector2d dlogits = cache.probs;
    dlogits(label) -= 1.0;
    dlogits *= weight;

    VectorXd head_in = cache.pooled;
    if (cache.dropout_mask.size() > 0) head_in = head_in.cwiseProduct(cache.dropout_mask);
    g.head_w += head_in * dlogits.transpose();
    g.head_b += dlogits;
    VectorXd dpooled = p.head_w * dlogits;
    if (cache.dropout_mask.size() > 0) dpooled = dpooled.cwiseProduct(cache.dropout_mask);

    MatrixXd dy = MatrixXd::Zero(m, d);
    dy.row(0) = dpooled.transpose();
    MatrixXd dx = layernorm_backward(dy, cache.ln_final, p.final_ln_gain,
                                     g.final_ln_gain, g.final_ln_bias);

    for (std::size_t li = p.layers.size(); li-- > 0;) {
        const auto& l = p.layers[li];
        const auto& c = cache.layers[li];
        auto& gl = g.layers[li];

        // FFN block: x_out = x_mid + gelu(LN2(x_mid) W1 + b1) W2 + b2
        const MatrixXd& df = dx;
        MatrixXd dh_ = df * l.ff_w2.transpose();
        gl.ff_w2 += c.h.transpose() * df;
        gl.ff_b2 += df.colwise().sum().transpose();
        MatrixXd dz = dh_.cwiseProduct(c.z.unaryExpr([](double v) { return gelu_grad(v); }));
        gl.ff_w1 += c.xn2.transpose() * dz;
        gl.ff_b1 += dz.colwise().sum().transpose();
        MatrixXd dxn2 = dz * l.ff_w1.transpose();
        MatrixXd dx_mid =
            dx + layernorm_backward(dxn2, c.ln2, l.ln2_gain, gl.ln2_gain, gl.ln2_bias);

        // attention block: x_mid = x_in + (concat_h A_h V_h) Wo + bo
        const MatrixXd& do_ = dx_mid;
        MatrixXd dc = do_ * l.attn.wo.transpose();
        gl.attn.wo += c.c.transpose() * do_;
        gl.attn.bo += do_.colwise().sum().transpose();

        MatrixXd dq = MatrixXd::Zero(m, d), dk = MatrixXd::Zero(m, d),
                 dv = MatrixXd::Zero(m, d);
        for (int h = 0; h < nh; ++h) {
            auto qh = c.q.middleCols(h * dh, dh);
            auto kh = c.k.middleCols(h * dh, dh);
            auto vh = c.v.middleCols(h * dh, dh);
            const MatrixXd& a = c.attn[static_cast<std::size_t>(h)];
            MatrixXd dch = dc.middleCols(h * dh, dh);
            MatrixXd da = dch * vh.transpose();
            dv.middleCols(h * dh, dh) = a.transpose() * dch;
            MatrixXd ds(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                double dot = da.row(i).cwiseProduct(a.row(i)).sum();
                ds.row(i) = a.row(i).array() * (da.row(i).array() - dot);
            }
            dq.middleCols(h * dh, dh) = ds * kh * scale;
            dk.middleCols(h * dh, dh) = ds.transpose() * qh * scale;
        }
        gl.attn.wq += c.xn1.transpose() * dq;
        gl.attn.bq += dq.colwise().sum().transpose();
        gl.attn.wk += c.xn1.transpose() * dk;
        gl.attn.bk += dk.colwise().sum().transpose();
        gl.attn.wv += c.xn1.transpose() * dv;
        gl.attn.bv += dv.colwise().sum().transpose();

        MatrixXd dxn1 = dq * l.attn.wq.transpose() + dk * l.attn.wk.transpose() +
                        dv * l.attn.wv.transpose();
        dx = dx_mid +
             layernorm_backward(dxn1, c.ln1, l.ln1_gain, gl.ln1_gain, gl.ln1_bias);
    }

    for (Eigen::Index i = 0; i < m; ++i) {
        g.token_embedding.row(ids[static_cast<std::size_t>(i)]) += dx.row(i);
        g.position_embedding.row(i) += dx.row(i);
    }
}

}  // namespace

double TinyEncoder::prob_class1(const std::vector<TokenId>& ids) const {
    ForwardCache cache;
    forward_example(config_, params_, ids, cache, 0.0, nullptr);
    return cache.probs(1);
}

VectorXd TinyEncoder::pooled(const std::vector<TokenId>& ids) const {
    ForwardCache cache;
    forward_example(config_, params_, ids, cache, 0.0, nullptr);
    return cache.pooled;
}

double TinyEncoder::batch_loss(const std::vector<Example>& batch) const {
    double total = 0.0;
    for (const auto& ex : batch) {
        ForwardCache cache;
        forward_example(config_, params_, ex.ids, cache, 0.0, nullptr);
        total += -std::log(std::max(cache.probs(ex.label), 1e-300));
    }
    return total / static_cast<double>(batch.size());
}

double TinyEncoder::loss_and_gradients(const std::vector<Example>& batch,
                                       EncoderParams& grads, Rng* dropout_rng) const {
    const double weight = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& ex : batch) {
        if (ex.label != 0 && ex.label != 1) {
            throw DataError("unlabeled example in a training batch");
        }
        ForwardCache cache;
        forward_example(config_, params_, ex.ids, cache, config_.head_dropout,
                        dropout_rng);
        total += -std::log(std::max(cache.probs(ex.label), 1e-300));
        backward_example(config_, params_, ex.ids, cache, ex.label, weight, grads);
    }
    return total / static_cast<double>(batch.size());
}

namespace {

struct AdamState {
    EncoderParams m, v;
    std::int64_t step = 0;
};

bool weight_decayed(const std::string& name) {
    return name.find("_gain") == std::string::npos &&
           name.find("_bias") == std::string::npos &&
           name.find(".b") == std::string::npos && name != "head_b";
}

void adamw_step(EncoderParams& params, EncoderParams& grads, AdamState& state,
                double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8, decay = 0.01;
    ++state.step;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    auto p_refs = tensor_refs(params);
    auto g_refs = tensor_refs(grads);
    auto m_refs = tensor_refs(state.m);
    auto v_refs = tensor_refs(state.v);
    for (std::size_t t = 0; t < p_refs.size(); ++t) {
        bool decayed = weight_decayed(p_refs[t].name);
        for (Eigen::Index i = 0; i < p_refs[t].size(); ++i) {
            double g = g_refs[t].data[i];
            double& m = m_refs[t].data[i];
            double& v = v_refs[t].data[i];
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            double update = (m / bc1) / (std::sqrt(v / bc2) + eps);
            if (decayed) update += decay * p_refs[t].data[i];
            p_refs[t].data[i] -= lr * update;
        }
    }
}

void zero_params(EncoderParams& p) {
    for (auto& ref : tensor_refs(p)) {
        std::fill(ref.data, ref.data + ref.size(), 0.0);
    }
}

void validate_dataset(const EncodedDataset& data, const EncoderConfig& cfg,
                      bool require_labels, const char* which) {
    for (const auto& entry : data) {
        if (require_labels && !entry.label) {
            throw DataError(std::string(which) + " entry '" + entry.record_id +
                            "' is unlabeled");
        }
        if (entry.input.token_ids.size() >
            static_cast<std::size_t>(entry.input.budget)) {
            throw DataError(std::string(which) + " entry '" + entry.record_id +
                            "' exceeds its budget");
        }
        for (std::size_t i = 0; i < entry.input.token_ids.size(); ++i) {
            TokenId t = entry.input.token_ids[i];
            if (entry.input.attention_mask[i] == 1 &&
                (t < 0 || static_cast<std::size_t>(t) >= cfg.vocab_size)) {
                throw RuntimeFailure("entry '" + entry.record_id +
                                     "' has token ids outside the encoder vocabulary");
            }
        }
    }
}

}  // namespace

TrainedModel fine_tune(const EncoderSpec& spec, const EncoderConfig& config,
                       const EncodedDataset& train, const EncodedDataset& val,
                       const Hyperparams& hp, WeightProvider& provider) {
    hp.validate();
    if (train.empty()) throw DataError("training set is empty");
    validate_dataset(train, config, true, "training");
    validate_dataset(val, config, true, "validation");

    TinyEncoder model(config, provider.provide(config, hp.seed));
    AdamState adam{EncoderParams::zeros(config), EncoderParams::zeros(config), 0};
    EncoderParams grads = EncoderParams::zeros(config);

    std::vector<Example> train_ex, val_ex;
    for (const auto& e : train) train_ex.push_back(to_example(e));
    for (const auto& e : val) val_ex.push_back(to_example(e));

    Rng shuffle_rng(hp.seed);
    Rng dropout_rng(hp.seed + 1);
    const std::size_t n = train_ex.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainedModel out;
    out.spec = spec;
    out.config = config;
    out.hyperparams = hp;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hp.batch_size)) {
            std::size_t end = std::min(n, start + static_cast<std::size_t>(hp.batch_size));
            std::vector<Example> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) batch.push_back(train_ex[order[i]]);
            zero_params(grads);
            double batch_mean = model.loss_and_gradients(batch, grads, &dropout_rng);
            loss_sum += batch_mean * static_cast<double>(batch.size());
            adamw_step(model.params(), grads, adam, hp.learning_rate);
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(n);
        if (!val_ex.empty()) {
            stats.val_loss = model.batch_loss(val_ex);
            std::vector<int> preds, gold;
            for (const auto& ex : val_ex) {
                preds.push_back(model.prob_class1(ex.ids) >= 0.5 ? 1 : 0);
                gold.push_back(ex.label);
            }
            stats.val_f1 = report_from_confusion(confusion(preds, gold)).macro_f1;
        }
        out.history.push_back(stats);
    }

    out.params = std::move(model.params());
    return out;
}

std::vector<Prediction> predict(const TrainedModel& model, const EncodedDataset& inputs) {
    validate_dataset(inputs, model.config, false, "prediction");
    TinyEncoder enc(model.config, model.params);
    std::vector<Prediction> out;
    out.reserve(inputs.size());
    for (const auto& entry : inputs) {
        Example ex = to_example(entry);
        double p1 = enc.prob_class1(ex.ids);
        out.push_back({p1, p1 >= 0.5 ? 1 : 0});
    }
    return out;
}

}  // namespace convsarc
