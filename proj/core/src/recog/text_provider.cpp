// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/recog/text_provider.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "kinesis/common/error.hpp"
#include "kinesis/common/hash.hpp"
#include "kinesis/common/rng.hpp"

namespace kinesis::recog {

TextEmbeddingProvider TextEmbeddingProvider::seeded(std::uint64_t seed, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
  TextEmbeddingProvider p;
  p.kind_ = Kind::kSeededRandom;
  p.seed_ = seed;
  p.dim_ = dim;
  return p;
}

TextEmbeddingProvider TextEmbeddingProvider::from_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "embedding table not found", path.string());
  TextEmbeddingProvider p;
  p.kind_ = Kind::kTable;
  std::string line;
  std::size_t count = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "missing header", path.string() + ":1");
  {
    std::istringstream header(line);
    if (!(header >> p.dim_ >> count) || p.dim_ == 0) {
      throw Error(ErrorCode::kParse, "header must be '<dim> <count>'", path.string() + ":1");
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kParse, "expected label<TAB>values", where);
    const std::string label = line.substr(0, tab);
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.dim_));
    const char* cur = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    for (std::size_t k = 0; k < p.dim_; ++k) {
      double value = 0.0;
      const auto res = std::from_chars(cur, end, value);
      if (res.ec != std::errc()) throw Error(ErrorCode::kParse, "bad value " + std::to_string(k + 1), where);
      v[static_cast<Eigen::Index>(k)] = value;
      cur = res.ptr;
      if (k + 1 < p.dim_) {
        if (cur == end || *cur != ',') throw Error(ErrorCode::kParse, "too few values", where);
        ++cur;
      }
    }
    if (cur != end) throw Error(ErrorCode::kParse, "too many values", where);
    const double n = v.norm();
    if (!(n > 0.0)) throw Error(ErrorCode::kParse, "zero vector", where);
    if (!p.table_.emplace(label, v / n).second) throw Error(ErrorCode::kDuplicateId, "duplicate label", label);
  }
  if (p.table_.size() != count) {
    throw Error(ErrorCode::kParse,
                "header promises " + std::to_string(count) + " rows, found " + std::to_string(p.table_.size()),
                path.string());
  }
  return p;
}

void TextEmbeddingProvider::save_table(const std::filesystem::path& path, const LabelSet& labels) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write embedding table", path.string());
  out << dim_ << ' ' << labels.size() << '\n';
  char buf[32];
  for (const auto& label : labels) {
    const Eigen::VectorXd v = embed(label);
    out << label << '\t';
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v[k]);
      if (k) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

bool TextEmbeddingProvider::covers(const std::string& label) const {
  return kind_ == Kind::kSeededRandom || table_.contains(label);
}

Eigen::VectorXd TextEmbeddingProvider::embed(const std::string& label) const {
  if (kind_ == Kind::kTable) {
    const auto it = table_.find(label);
    if (it == table_.end()) throw Error(ErrorCode::kUnknownLabel, "label missing from embedding table", label);
    return it->second;
  }
  Rng rng(derive_seed(seed_, fnv1a(label)));
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = dist(rng);
  return v / v.norm();
}

Eigen::MatrixXd TextEmbeddingProvider::embed_labels(const LabelSet& labels) const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < labels.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = embed(labels[i]).transpose();
  return m;
}

std::string TextEmbeddingProvider::hash() const {
  Sha256 h;
  h.update(kind_ == Kind::kTable ? std::string_view("table") : std::string_view("seeded"));
  h.update_pod(static_cast<std::uint64_t>(dim_));
  h.update_pod(seed_);
  for (const auto& [label, v] : table_) {
    h.update(label);
    h.update(std::span(reinterpret_cast<const std::byte*>(v.data()), sizeof(double) * static_cast<std::size_t>(v.size())));
  }
  return h.hex_digest();
}

}  // namespace kinesis::recog
