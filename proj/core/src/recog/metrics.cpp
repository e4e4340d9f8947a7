// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "kinesis/recog/metrics.hpp"

#include <fstream>

#include "kinesis/common/error.hpp"

namespace kinesis::recog {

RecognitionReport score_predictions(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& predicted,
                                    const LabelSet& labels) {
  if (gold.size() != predicted.size()) throw Error(ErrorCode::kDimensionMismatch, "gold and predicted differ in count");
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "no predictions to score");
  const std::size_t n = labels.size();
  RecognitionReport r;
  r.labels = labels;
  r.total = gold.size();
  r.confusion.assign(n, std::vector<std::size_t>(n, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= n || predicted[i] >= n) throw Error(ErrorCode::kOutOfBounds, "class index outside label set");
    ++r.confusion[gold[i]][predicted[i]];
    correct += gold[i] == predicted[i];
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  r.classes.resize(n);
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t predicted_c = 0;
    std::size_t support = 0;
    for (std::size_t k = 0; k < n; ++k) {
      predicted_c += r.confusion[k][c];
      support += r.confusion[c][k];
    }
    auto& s = r.classes[c];
    const auto tp = static_cast<double>(r.confusion[c][c]);
    s.support = support;
    s.precision = predicted_c ? tp / static_cast<double>(predicted_c) : 0.0;
    s.recall = support ? tp / static_cast<double>(support) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    f1_sum += s.f1;
  }
  r.macro_f1 = f1_sum / static_cast<double>(n);
  return r;
}

RecognitionReport eval_recognition(const SignalEncoder& encoder, const TextEmbeddingProvider& provider,
                                   const std::vector<LabeledSegment>& test, const LabelSet& labels) {
  if (test.empty()) throw Error(ErrorCode::kEmptyInput, "test set is empty");
  const Eigen::MatrixXd table = provider.embed_labels(labels);
  std::vector<std::size_t> gold, predicted;
  for (const auto& s : test) {
    gold.push_back(labels.index_of(s.label));
    predicted.push_back(classify(encoder.embed(s.frames), table, labels).index);
  }
  return score_predictions(gold, predicted, labels);
}

nlohmann::json to_json(const RecognitionReport& r) {
  nlohmann::json classes = nlohmann::json::object();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& s = r.classes[c];
    classes[r.labels[c]] = {{"support", s.support}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  }
  return {{"total", r.total},
          {"accuracy", r.accuracy},
          {"macro_f1", r.macro_f1},
          {"labels", r.labels.labels()},
          {"classes", classes},
          {"confusion", r.confusion}};
}

void save_confusion_csv(const std::filesystem::path& path, const RecognitionReport& r) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write confusion matrix", path.string());
  auto quoted = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  out << "gold\\predicted";
  for (const auto& l : r.labels) out << ',' << quoted(l);
  out << '\n';
  for (std::size_t g = 0; g < r.confusion.size(); ++g) {
    out << quoted(r.labels[g]);
    for (const auto v : r.confusion[g]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace kinesis::recog
