// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/recog/encoder.hpp"

#include <spdlog/spdlog.h>

#include "kinesis/common/error.hpp"
#include "kinesis/nn/checkpoint.hpp"

namespace kinesis::recog {

using nn::Matrix;

void to_json(nlohmann::json& j, const EncoderArch& a) {
  j = {{"patch", a.patch}, {"width", a.width},           {"heads", a.heads}, {"ffn", a.ffn},
       {"layers", a.layers}, {"max_frames", a.max_frames}, {"dim", a.dim}};
}

void from_json(const nlohmann::json& j, EncoderArch& a) {
  EncoderArch d;
  a.patch = j.value("patch", d.patch);
  a.width = j.value("width", d.width);
  a.heads = j.value("heads", d.heads);
  a.ffn = j.value("ffn", d.ffn);
  a.layers = j.value("layers", d.layers);
  a.max_frames = j.value("max_frames", d.max_frames);
  a.dim = j.value("dim", d.dim);
}

void to_json(nlohmann::json& j, const LoraConfig& c) {
  j = {{"rank", c.rank}, {"alpha", c.effective_alpha()}, {"query", c.query}, {"value", c.value}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, LoraConfig& c) {
  LoraConfig d;
  c.rank = j.value("rank", d.rank);
  c.alpha = j.value("alpha", d.alpha);
  c.query = j.value("query", d.query);
  c.value = j.value("value", d.value);
  c.seed = j.value("seed", d.seed);
}

template <class T>
BasicSignalEncoder<T>::BasicSignalEncoder(const EncoderArch& arch, std::uint64_t seed)
    : arch_(arch),
      patch_("encoder.patch", arch.patch * static_cast<int>(signal::kChannels), arch.width),
      position_("encoder.position", Matrix<T>::Zero(arch.max_tokens(), arch.width)),
      final_norm_("encoder.final_norm", arch.width),
      projection_("encoder.projection", arch.width, arch.dim) {
  if (arch.patch < 1 || arch.width < 1 || arch.heads < 1 || arch.width % arch.heads != 0 || arch.layers < 1 ||
      arch.max_frames < arch.patch || arch.dim < 1 || arch.ffn < 1) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported encoder architecture");
  }
  Rng rng(seed);
  patch_.init(rng);
  nn::fill_normal(position_.mutable_value(), 0.02, rng);
  for (int l = 0; l < arch.layers; ++l) {
    blocks_.emplace_back("encoder.block" + std::to_string(l), arch.width, arch.heads, arch.ffn);
    blocks_.back().init(rng);
  }
  projection_.init(rng);
}

template <class T>
Matrix<T> BasicSignalEncoder<T>::tokenize(const Eigen::Ref<const Eigen::MatrixXd>& frames) const {
  if (frames.cols() != static_cast<Eigen::Index>(signal::kChannels)) {
    throw Error(ErrorCode::kDimensionMismatch, "expected 6 channels, got " + std::to_string(frames.cols()),
                "segment");
  }
  if (frames.rows() == 0) throw Error(ErrorCode::kEmptyInput, "cannot embed an empty segment");
  Eigen::Index n = frames.rows();
  if (n > arch_.max_frames) {
    spdlog::warn("segment of {} frames truncated to {}", n, arch_.max_frames);
    n = arch_.max_frames;
  }
  const Eigen::Index patch = arch_.patch;
  const Eigen::Index tokens = (n + patch - 1) / patch;
  const auto ch = static_cast<Eigen::Index>(signal::kChannels);
  Matrix<T> out = Matrix<T>::Zero(tokens, patch * ch);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < ch; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      out(i / patch, (i % patch) * ch + c) = static_cast<T>((frames(i, c) - norm_.mean[ci]) / norm_.std[ci]);
    }
  }
  return out;
}

template <class T>
Matrix<T> BasicSignalEncoder<T>::forward(const Matrix<T>& tokens) const {
  Cache cache;
  return forward(tokens, cache);
}

template <class T>
Matrix<T> BasicSignalEncoder<T>::forward(const Matrix<T>& tokens, Cache& cache) const {
  if (tokens.rows() < 1 || tokens.rows() > position_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "token count outside encoder context");
  }
  cache.tokens = tokens.rows();
  Matrix<T> x = patch_.forward(tokens, cache.patch);
  x += position_.value().topRows(tokens.rows());
  cache.blocks.resize(blocks_.size());
  for (std::size_t l = 0; l < blocks_.size(); ++l) x = blocks_[l].forward(x, cache.blocks[l]);
  const Matrix<T> normed = final_norm_.forward(x, cache.final_norm);
  const Matrix<T> pooled = normed.colwise().mean();
  return projection_.forward(pooled, cache.projection);
}

template <class T>
Matrix<T> BasicSignalEncoder<T>::backward(const Cache& cache, const Matrix<T>& dout) {
  const Matrix<T> dpooled = projection_.backward(cache.projection, dout);
  Matrix<T> dnormed(cache.tokens, arch_.width);
  dnormed.rowwise() = dpooled.row(0) / static_cast<T>(cache.tokens);
  Matrix<T> dx = final_norm_.backward(cache.final_norm, dnormed);
  for (std::size_t l = blocks_.size(); l-- > 0;) dx = blocks_[l].backward(cache.blocks[l], dx);
  if (position_.trainable()) position_.grad().topRows(cache.tokens) += dx;
  return patch_.backward(cache.patch, dx);
}

template <class T>
Eigen::VectorXd BasicSignalEncoder<T>::embed(const Eigen::Ref<const Eigen::MatrixXd>& frames) const {
  const Matrix<T> out = forward(tokenize(frames));
  Eigen::VectorXd v = out.row(0).transpose().template cast<double>();
  const double n = v.norm();
  return n > 0.0 ? Eigen::VectorXd(v / n) : v;
}

template <class T>
Eigen::VectorXd BasicSignalEncoder<T>::embed(const Eigen::Ref<const Eigen::MatrixXd>& frames, std::size_t valid) const {
  if (valid > static_cast<std::size_t>(frames.rows())) {
    throw Error(ErrorCode::kOutOfBounds, "valid length exceeds segment", "valid");
  }
  return embed(frames.topRows(static_cast<Eigen::Index>(valid)));
}

template <class T>
void BasicSignalEncoder<T>::inject_lora(const LoraConfig& cfg) {
  if (has_lora()) throw Error(ErrorCode::kInvalidArgument, "adapters already attached");
  if (!cfg.query && !cfg.value) throw Error(ErrorCode::kInvalidArgument, "no adapter targets selected");
  if (cfg.rank < 1 || cfg.rank > arch_.width) {
    throw Error(ErrorCode::kRankTooLarge,
                "rank " + std::to_string(cfg.rank) + " outside [1, " + std::to_string(arch_.width) + "]", "rank");
  }
  Rng rng(cfg.seed);
  for (auto& b : blocks_) {
    if (cfg.query) b.attention().query().attach_lora(cfg.rank, cfg.effective_alpha(), rng);
    if (cfg.value) b.attention().value().attach_lora(cfg.rank, cfg.effective_alpha(), rng);
  }
  lora_ = cfg;
  set_base_frozen(true);
}

template <class T>
bool BasicSignalEncoder<T>::has_lora() const {
  for (const auto& b : blocks_) {
    if (b.attention().query().has_lora() || b.attention().value().has_lora()) return true;
  }
  return false;
}

template <class T>
void BasicSignalEncoder<T>::merge_lora() {
  if (!has_lora()) throw Error(ErrorCode::kNoAdapters, "encoder has no adapters to merge");
  for (auto& b : blocks_) {
    if (b.attention().query().has_lora()) b.attention().query().merge_lora();
    if (b.attention().value().has_lora()) b.attention().value().merge_lora();
  }
  set_base_frozen(false);
}

template <class T>
void BasicSignalEncoder<T>::set_base_frozen(bool frozen) {
  patch_.set_frozen(frozen);
  position_.set_frozen(frozen);
  for (auto& b : blocks_) b.set_frozen(frozen);
  final_norm_.set_frozen(frozen);
  projection_.set_frozen(frozen);
}

template <class T>
nn::ParameterRefs<T> BasicSignalEncoder<T>::parameters() {
  nn::ParameterRefs<T> out;
  patch_.collect(out);
  out.push_back(&position_);
  for (auto& b : blocks_) b.collect(out);
  final_norm_.collect(out);
  projection_.collect(out);
  return out;
}

template <class T>
std::vector<const nn::Parameter<T>*> BasicSignalEncoder<T>::parameters() const {
  std::vector<const nn::Parameter<T>*> out;
  patch_.collect(out);
  out.push_back(&position_);
  for (const auto& b : blocks_) b.collect(out);
  final_norm_.collect(out);
  projection_.collect(out);
  return out;
}

namespace {

bool is_adapter(const std::string& name) {
  return name.ends_with(".lora_down") || name.ends_with(".lora_up");
}

}  // namespace

template <class T>
std::vector<const nn::Parameter<T>*> BasicSignalEncoder<T>::base_parameters() const {
  auto all = parameters();
  std::erase_if(all, [](const nn::Parameter<T>* p) { return is_adapter(p->name()); });
  return all;
}

template <class T>
std::vector<const nn::Parameter<T>*> BasicSignalEncoder<T>::adapter_parameters() const {
  auto all = parameters();
  std::erase_if(all, [](const nn::Parameter<T>* p) { return !is_adapter(p->name()); });
  return all;
}

template <class T>
std::string BasicSignalEncoder<T>::base_hash() const {
  return nn::parameters_hash(base_parameters());
}

template <class T>
std::string BasicSignalEncoder<T>::parameters_hash() const {
  return nn::parameters_hash(parameters());
}

template <class T>
std::size_t BasicSignalEncoder<T>::trainable_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) {
    if (p->trainable()) n += static_cast<std::size_t>(p->size());
  }
  return n;
}

template class BasicSignalEncoder<float>;
template class BasicSignalEncoder<double>;

void save_encoder(const std::filesystem::path& path, const SignalEncoder& encoder,
                  const std::vector<EncoderRecord>& history) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : history) {
    records.push_back({{"stage", r.stage},
                       {"epochs", r.epochs},
                       {"seed", r.seed},
                       {"loss_curve", r.loss_curve},
                       {"validation_curve", r.validation_curve}});
  }
  nlohmann::json header = {{"arch", encoder.arch()}, {"norm", encoder.norm()}, {"history", records}};
  if (encoder.has_lora()) header["lora"] = encoder.lora_config();
  nn::Checkpoint ckpt(kEncoderKind, header);
  for (const auto* p : encoder.parameters()) ckpt.add(*p);
  ckpt.save(path);
}

SignalEncoder load_encoder(const std::filesystem::path& path, std::vector<EncoderRecord>* history) {
  const auto ckpt = nn::Checkpoint::load(path, kEncoderKind);
  const auto& h = ckpt.header();
  try {
    SignalEncoder enc(h.at("arch").get<EncoderArch>(), 0);
    enc.set_norm(h.at("norm").get<signal::NormStats>());
    if (h.contains("lora")) enc.inject_lora(h.at("lora").get<LoraConfig>());
    for (auto* p : enc.parameters()) ckpt.restore(*p);
    if (history) {
      history->clear();
      for (const auto& r : h.at("history")) {
        history->push_back({r.at("stage").get<std::string>(), r.at("epochs").get<std::size_t>(),
                            r.at("seed").get<std::uint64_t>(), r.at("loss_curve").get<std::vector<double>>(),
                            r.at("validation_curve").get<std::vector<double>>()});
      }
    }
    return enc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("encoder header: ") + e.what(), path.string());
  }
}

}  // namespace kinesis::recog
