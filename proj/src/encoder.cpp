#include "hft/encoder.hpp"

#include <cmath>

#include "hft/error.hpp"
#include "hft/rng.hpp"

namespace hft {

using nlohmann::json;

// ---- config ------------------------------------------------------------

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, "model." + what); };
  if (vocab_size < 4) fail("vocab_size must cover the specials plus at least one token");
  if (max_len < 1 || max_len > kDefaultMaxLen) fail("max_len must be in [1, 128]");
  if (hidden_dim == 0) fail("hidden_dim must be positive");
  if (num_heads == 0 || hidden_dim % num_heads != 0) {
    fail("hidden_dim (" + std::to_string(hidden_dim) + ") must be divisible by num_heads (" +
         std::to_string(num_heads) + ")");
  }
  if (ff_dim == 0) fail("ff_dim must be positive");
  if (num_classes != 2) fail("num_classes must be 2");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (!(init_std > 0.0)) fail("init_std must be positive");
}

void to_json(json& j, const ModelConfig& c) {
  j = json{{"vocab_size", c.vocab_size}, {"max_len", c.max_len},     {"hidden_dim", c.hidden_dim},
           {"num_layers", c.num_layers}, {"num_heads", c.num_heads}, {"ff_dim", c.ff_dim},
           {"num_classes", c.num_classes}, {"dropout", c.dropout},   {"init_std", c.init_std},
           {"seed", c.seed}};
}

void from_json(const json& j, ModelConfig& c) {
  ModelConfig d;
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.max_len = j.value("max_len", d.max_len);
  c.hidden_dim = j.value("hidden_dim", d.hidden_dim);
  c.num_layers = j.value("num_layers", d.num_layers);
  c.num_heads = j.value("num_heads", d.num_heads);
  c.ff_dim = j.value("ff_dim", d.ff_dim);
  c.num_classes = j.value("num_classes", d.num_classes);
  c.dropout = j.value("dropout", d.dropout);
  c.init_std = j.value("init_std", d.init_std);
  c.seed = j.value("seed", d.seed);
}

// ---- parameters --------------------------------------------------------

std::vector<NamedTensor> EncoderModel::named_parameters() const {
  std::vector<NamedTensor> out;
  out.push_back({"token_embedding", token_embedding});
  out.push_back({"position_embedding", position_embedding});
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string p = "layer" + std::to_string(i) + ".";
    const EncoderLayer& l = layers[i];
    out.push_back({p + "ln1_gain", l.ln1_gain});
    out.push_back({p + "ln1_bias", l.ln1_bias});
    out.push_back({p + "qkv_weight", l.qkv_weight});
    out.push_back({p + "qkv_bias", l.qkv_bias});
    out.push_back({p + "out_weight", l.out_weight});
    out.push_back({p + "out_bias", l.out_bias});
    out.push_back({p + "ln2_gain", l.ln2_gain});
    out.push_back({p + "ln2_bias", l.ln2_bias});
    out.push_back({p + "ff1_weight", l.ff1_weight});
    out.push_back({p + "ff1_bias", l.ff1_bias});
    out.push_back({p + "ff2_weight", l.ff2_weight});
    out.push_back({p + "ff2_bias", l.ff2_bias});
  }
  out.push_back({"final_ln_gain", final_ln_gain});
  out.push_back({"final_ln_bias", final_ln_bias});
  out.push_back({"classifier_weight", classifier_weight});
  out.push_back({"classifier_bias", classifier_bias});
  return out;
}

std::vector<Tensor> EncoderModel::parameters() const {
  std::vector<Tensor> out;
  for (auto& np : named_parameters()) out.push_back(np.tensor);
  return out;
}

std::size_t EncoderModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.numel();
  return n;
}

void EncoderModel::zero_grad() {
  for (auto& p : parameters()) p.zero_grad();
}

std::size_t expected_parameter_count(const ModelConfig& c) {
  const std::size_t h = c.hidden_dim, f = c.ff_dim;
  return c.vocab_size * h + c.max_len * h + c.num_layers * (4 * h * h + 2 * h * f + 9 * h + f) +
         2 * h + h * c.num_classes + c.num_classes;
}

namespace {

Tensor normal_param(Shape shape, double std, Rng& rng) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.normal(0.0, std);
  return Tensor(std::move(shape), std::move(v), true);
}

Tensor zeros_param(std::size_t n) { return Tensor::zeros({n}, true); }

Tensor ones_param(std::size_t n) { return Tensor({n}, std::vector<double>(n, 1.0), true); }

}  // namespace

EncoderModel init_model(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t h = config.hidden_dim, f = config.ff_dim;
  const double s = config.init_std;
  EncoderModel m;
  m.config = config;
  m.token_embedding = normal_param({config.vocab_size, h}, s, rng);
  m.position_embedding = normal_param({config.max_len, h}, s, rng);
  for (std::size_t i = 0; i < config.num_layers; ++i) {
    EncoderLayer l;
    l.ln1_gain = ones_param(h);
    l.ln1_bias = zeros_param(h);
    l.qkv_weight = normal_param({h, 3 * h}, s, rng);
    l.qkv_bias = zeros_param(3 * h);
    l.out_weight = normal_param({h, h}, s, rng);
    l.out_bias = zeros_param(h);
    l.ln2_gain = ones_param(h);
    l.ln2_bias = zeros_param(h);
    l.ff1_weight = normal_param({h, f}, s, rng);
    l.ff1_bias = zeros_param(f);
    l.ff2_weight = normal_param({f, h}, s, rng);
    l.ff2_bias = zeros_param(h);
    m.layers.push_back(std::move(l));
  }
  m.final_ln_gain = ones_param(h);
  m.final_ln_bias = zeros_param(h);
  m.classifier_weight = normal_param({h, config.num_classes}, s, rng);
  m.classifier_bias = zeros_param(config.num_classes);
  return m;
}

// ---- forward -----------------------------------------------------------

namespace {

Tensor embed_rows(const EncoderModel& model, const TokenSequence& seq, std::size_t rows) {
  if (seq.ids.size() > model.config.max_len) {
    throw Error(ErrorCode::ShapeMismatch, "sequence longer than model max_len");
  }
  std::span<const TokenId> ids(seq.ids.data(), rows);
  const Tensor tokens = gather_rows(model.token_embedding, ids);
  const Tensor positions = slice_rows(model.position_embedding, 0, rows);
  return add(tokens, positions);
}

Tensor attention(const EncoderLayer& layer, const Tensor& x, std::span<const std::uint8_t> mask,
                 std::size_t heads) {
  const std::size_t h = x.dim(1);
  const std::size_t head_dim = h / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const Tensor qkv = add_row(matmul(x, layer.qkv_weight), layer.qkv_bias);
  std::vector<Tensor> contexts;
  contexts.reserve(heads);
  for (std::size_t i = 0; i < heads; ++i) {
    const Tensor q = slice_cols(qkv, i * head_dim, head_dim);
    const Tensor k = slice_cols(qkv, h + i * head_dim, head_dim);
    const Tensor v = slice_cols(qkv, 2 * h + i * head_dim, head_dim);
    const Tensor scores = scale(matmul(q, transpose(k)), inv_sqrt);
    contexts.push_back(matmul(masked_softmax_rows(scores, mask), v));
  }
  const Tensor ctx = heads == 1 ? contexts[0] : concat_cols(contexts);
  return add_row(matmul(ctx, layer.out_weight), layer.out_bias);
}

}  // namespace

Tensor embed(const EncoderModel& model, const TokenSequence& seq) {
  if (seq.ids.size() != model.config.max_len) {
    throw Error(ErrorCode::ShapeMismatch, "sequence length " + std::to_string(seq.ids.size()) +
                                              " != max_len " + std::to_string(model.config.max_len));
  }
  return embed_rows(model, seq, seq.ids.size());
}

Tensor embed_prefix(const EncoderModel& model, const TokenSequence& seq) {
  return embed_rows(model, seq, std::max<std::size_t>(seq.true_length, 1));
}

PredictedFeatures forward(const EncoderModel& model, const Tensor& embeddings,
                          std::span<const std::uint8_t> mask, const ForwardOptions& options) {
  const ModelConfig& cfg = model.config;
  if (embeddings.rank() != 2 || embeddings.dim(1) != cfg.hidden_dim ||
      embeddings.dim(0) > cfg.max_len || mask.size() < embeddings.dim(0)) {
    throw Error(ErrorCode::ShapeMismatch, "forward: embeddings must be [rows x hidden] with rows <= max_len and a mask per row");
  }
  const std::size_t rows = embeddings.dim(0);
  const auto key_mask = mask.first(rows);
  Rng dropout_rng(options.dropout_seed);

  Tensor x = embeddings;
  for (const EncoderLayer& layer : model.layers) {
    Tensor a = attention(layer, layer_norm(x, layer.ln1_gain, layer.ln1_bias), key_mask, cfg.num_heads);
    x = add(x, dropout(a, cfg.dropout, options.training, dropout_rng));
    Tensor f = gelu(add_row(matmul(layer_norm(x, layer.ln2_gain, layer.ln2_bias), layer.ff1_weight),
                            layer.ff1_bias));
    f = add_row(matmul(f, layer.ff2_weight), layer.ff2_bias);
    x = add(x, dropout(f, cfg.dropout, options.training, dropout_rng));
  }
  const Tensor cls = slice_rows(layer_norm(x, model.final_ln_gain, model.final_ln_bias), 0, 1);
  PredictedFeatures out;
  out.pooled = reshape(cls, {cfg.hidden_dim});
  out.logits = reshape(add_row(matmul(cls, model.classifier_weight), model.classifier_bias),
                       {cfg.num_classes});
  return out;
}

std::vector<PredictedFeatures> forward_batch(const EncoderModel& model,
                                             std::span<const TokenSequence> batch,
                                             const ForwardOptions& options) {
  std::vector<PredictedFeatures> out;
  out.reserve(batch.size());
  for (const TokenSequence& seq : batch) out.push_back(forward(model, embed_prefix(model, seq), seq.mask, options));
  return out;
}

// ---- fusion ------------------------------------------------------------

std::string_view to_string(FusionMode mode) noexcept {
  return mode == FusionMode::Logits ? "logits" : "logits+pooled";
}

FusionMode parse_fusion_mode(std::string_view text) {
  if (text == "logits") return FusionMode::Logits;
  if (text == "logits+pooled") return FusionMode::LogitsAndPooled;
  throw Error(ErrorCode::InvalidConfig,
              "fusion.mode must be 'logits' or 'logits+pooled', got '" + std::string(text) + "'");
}

std::size_t FusionHead::input_width() const {
  return mode == FusionMode::Logits ? 4 : 4 + hidden_a + hidden_b;
}

std::vector<NamedTensor> FusionHead::named_parameters() const {
  return {{"fusion.w1", w1}, {"fusion.b1", b1}, {"fusion.w2", w2}, {"fusion.b2", b2}};
}

std::vector<Tensor> FusionHead::parameters() const { return {w1, b1, w2, b2}; }

FusionHead init_fusion_head(FusionMode mode, std::size_t hidden_a, std::size_t hidden_b,
                            std::size_t fusion_hidden, std::uint64_t seed, double init_std) {
  if (fusion_hidden == 0) throw Error(ErrorCode::InvalidConfig, "fusion.hidden must be positive");
  FusionHead head;
  head.mode = mode;
  head.hidden_a = hidden_a;
  head.hidden_b = hidden_b;
  head.fusion_hidden = fusion_hidden;
  Rng rng(seed);
  head.w1 = normal_param({head.input_width(), fusion_hidden}, init_std, rng);
  head.b1 = zeros_param(fusion_hidden);
  head.w2 = normal_param({fusion_hidden, 2}, init_std, rng);
  head.b2 = zeros_param(2);
  return head;
}

FusionHead pass_through_head(FusionMode mode, std::size_t hidden_a, std::size_t hidden_b,
                             std::size_t fusion_hidden) {
  if (fusion_hidden < 4) {
    throw Error(ErrorCode::InvalidConfig, "pass-through fusion head needs fusion.hidden >= 4");
  }
  FusionHead head;
  head.mode = mode;
  head.hidden_a = hidden_a;
  head.hidden_b = hidden_b;
  head.fusion_hidden = fusion_hidden;
  const std::size_t in = head.input_width();
  std::vector<double> w1(in * fusion_hidden, 0.0), w2(fusion_hidden * 2, 0.0);
  // Hidden units 0..3 carry relu(za0), relu(-za0), relu(za1), relu(-za1).
  w1[0 * fusion_hidden + 0] = 1.0;
  w1[0 * fusion_hidden + 1] = -1.0;
  w1[1 * fusion_hidden + 2] = 1.0;
  w1[1 * fusion_hidden + 3] = -1.0;
  w2[0 * 2 + 0] = 1.0;
  w2[1 * 2 + 0] = -1.0;
  w2[2 * 2 + 1] = 1.0;
  w2[3 * 2 + 1] = -1.0;
  head.w1 = Tensor({in, fusion_hidden}, std::move(w1), true);
  head.b1 = zeros_param(fusion_hidden);
  head.w2 = Tensor({fusion_hidden, 2}, std::move(w2), true);
  head.b2 = zeros_param(2);
  return head;
}

Tensor fuse(const FusionHead& head, const PredictedFeatures& fa, const PredictedFeatures& fb) {
  if (fa.logits.numel() != 2 || fb.logits.numel() != 2) {
    throw Error(ErrorCode::WidthMismatch, "fusion expects two-class logits");
  }
  std::vector<Tensor> parts = {fa.logits, fb.logits};
  if (head.mode == FusionMode::LogitsAndPooled) {
    if (!fa.pooled.defined() || !fb.pooled.defined() || fa.pooled.numel() != head.hidden_a ||
        fb.pooled.numel() != head.hidden_b) {
      throw Error(ErrorCode::WidthMismatch, "pooled feature widths do not match the fusion head");
    }
    parts.push_back(fa.pooled);
    parts.push_back(fb.pooled);
  }
  const Tensor input = reshape(concat(parts), {1, head.input_width()});
  if (head.w1.dim(0) != head.input_width()) {
    throw Error(ErrorCode::WidthMismatch, "fusion head w1 rows != input width");
  }
  const Tensor hidden = relu(add_row(matmul(input, head.w1), head.b1));
  return reshape(add_row(matmul(hidden, head.w2), head.b2), {2});
}

// ---- persistence -------------------------------------------------------

namespace {

void copy_block(const Checkpoint& ckpt, const std::string& name, Tensor& dst) {
  const Tensor& src = ckpt.at(name);
  if (src.shape() != dst.shape()) {
    throw Error(ErrorCode::BadCheckpoint, "block '" + name + "' has the wrong shape");
  }
  auto values = dst.mutable_values();
  std::copy(src.values().begin(), src.values().end(), values.begin());
}

json parse_header(const Checkpoint& ckpt, std::string_view kind) {
  json header;
  try {
    header = json::parse(ckpt.header_json);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadCheckpoint, std::string("header is not JSON: ") + e.what());
  }
  if (header.value("kind", std::string()) != kind) {
    throw Error(ErrorCode::BadCheckpoint, "expected a '" + std::string(kind) + "' checkpoint");
  }
  return header;
}

}  // namespace

Checkpoint to_checkpoint(const EncoderModel& model, const json& extra) {
  Checkpoint ckpt;
  ckpt.header_json = json{{"kind", "encoder"}, {"model", model.config}, {"extra", extra}}.dump();
  for (auto& np : model.named_parameters()) ckpt.blocks.push_back({np.name, np.tensor.detach()});
  return ckpt;
}

EncoderModel model_from_checkpoint(const Checkpoint& ckpt) {
  const json header = parse_header(ckpt, "encoder");
  EncoderModel model = init_model(header.at("model").get<ModelConfig>());
  for (auto& np : model.named_parameters()) copy_block(ckpt, np.name, np.tensor);
  return model;
}

Checkpoint to_checkpoint(const FusionHead& head, const json& extra) {
  Checkpoint ckpt;
  ckpt.header_json = json{{"kind", "fusion"},
                          {"mode", to_string(head.mode)},
                          {"hidden_a", head.hidden_a},
                          {"hidden_b", head.hidden_b},
                          {"fusion_hidden", head.fusion_hidden},
                          {"extra", extra}}
                         .dump();
  for (auto& np : head.named_parameters()) ckpt.blocks.push_back({np.name, np.tensor.detach()});
  return ckpt;
}

FusionHead fusion_head_from_checkpoint(const Checkpoint& ckpt) {
  const json header = parse_header(ckpt, "fusion");
  FusionHead head = init_fusion_head(parse_fusion_mode(header.at("mode").get<std::string>()),
                                     header.at("hidden_a").get<std::size_t>(),
                                     header.at("hidden_b").get<std::size_t>(),
                                     header.at("fusion_hidden").get<std::size_t>(), 0);
  for (auto& np : head.named_parameters()) copy_block(ckpt, np.name, np.tensor);
  return head;
}

}  // namespace hft
