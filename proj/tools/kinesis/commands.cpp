// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kinesis/common/error.hpp"
#include "kinesis/common/hash.hpp"
#include "kinesis/motion/metrics.hpp"
#include "kinesis/pipeline/analyze.hpp"
#include "kinesis/pipeline/serialize.hpp"
#include "kinesis/pipeline/stats.hpp"
#include "kinesis/recog/metrics.hpp"
#include "kinesis/report/report.hpp"
#include "kinesis/signal/csv.hpp"
#include "kinesis/synth/dataset_io.hpp"
#include "kinesis/synth/pool.hpp"
#include "kinesis/synth/session.hpp"

namespace kinesis::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDetectorFile = "detector.ckpt";
constexpr const char* kPretrainedFile = "encoder_pretrained.ckpt";
constexpr const char* kEncoderFile = "encoder.ckpt";
constexpr const char* kScorerFile = "scorer.ckpt";
constexpr const char* kTextFile = "text_embeddings.tsv";

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void require_artifact(const fs::path& p, const std::string& what, const std::string& producer) {
  if (!fs::exists(p))
    throw Error(ErrorCode::kMissingArtifact, fmt::format("{} not found (run `{}` first)", what, producer),
                p.string());
}

json checkpoint_entry(const RunDirectory& run, const fs::path& p) {
  return {{"path", run.relative(p)}, {"sha256", sha256_file(p)}};
}

json encoder_record_json(const recog::EncoderRecord& r) {
  return {{"stage", r.stage}, {"epochs", r.epochs}, {"seed", r.seed}, {"loss_curve", r.loss_curve},
          {"validation_curve", r.validation_curve}};
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  out << j.dump(2) << '\n';
}

synth::LabeledSegmentPool motion_pool(const RunConfig& cfg) {
  return synth::make_parametric_pool(synth::kuhar_style_labels(), cfg.motion_data.pool_clips_per_label,
                                     cfg.motion_data.pool_min_frames, cfg.motion_data.pool_max_frames,
                                     stage_seed(cfg, Stage::kPool), signal::kCanonicalRateHz);
}

synth::BinaryPartition motion_partition() {
  synth::BinaryPartition part;
  const auto& motion = synth::kuhar_style_motion_labels();
  for (const auto& l : synth::kuhar_style_labels())
    (std::find(motion.begin(), motion.end(), l) != motion.end() ? part.motion : part.stationary).insert(l);
  return part;
}

synth::ClipSetConfig clip_config(const ClipConfig& c, std::uint64_t seed) {
  synth::ClipSetConfig out;
  out.per_label = c.per_label;
  out.min_frames = c.min_frames;
  out.max_frames = c.max_frames;
  out.seed = seed;
  return out;
}

std::vector<recog::LabeledSegment> to_segments(std::vector<synth::LabeledClip> clips) {
  std::vector<recog::LabeledSegment> out;
  out.reserve(clips.size());
  for (auto& c : clips) out.push_back({std::move(c.frames), std::move(c.label)});
  return out;
}

std::vector<quality::ScoredSample> to_scored(std::vector<synth::LabeledClip> clips) {
  std::vector<quality::ScoredSample> out;
  out.reserve(clips.size());
  for (auto& c : clips) out.push_back({{}, std::move(c.frames), std::move(c.label), c.score});
  return out;
}

recog::TextEmbeddingProvider load_text(const RunConfig& cfg, const RunDirectory& run) {
  if (cfg.text_table) return recog::TextEmbeddingProvider::from_table(*cfg.text_table);
  const auto path = run.checkpoint(kTextFile);
  require_artifact(path, "text embedding table", "pretrain-ar");
  return recog::TextEmbeddingProvider::from_table(path);
}

pipeline::ModelSet load_models(const RunConfig& cfg, const RunDirectory& run) {
  require_artifact(run.checkpoint(kDetectorFile), "detector checkpoint", "train-md");
  require_artifact(run.checkpoint(kEncoderFile), "fine-tuned encoder checkpoint", "finetune-ar");
  require_artifact(run.checkpoint(kScorerFile), "scorer checkpoint", "train-aqa");
  return {motion::Detector::load(run.checkpoint(kDetectorFile)), recog::load_encoder(run.checkpoint(kEncoderFile)),
          load_text(cfg, run), quality::load_scorer(run.checkpoint(kScorerFile)), recog::LabelSet(cfg.labels)};
}

std::string student_id_for(const signal::SignalSequence& seq, const fs::path& path) {
  return seq.subject_id().value_or(path.stem().string());
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, RunDirectory& run) {
  Stopwatch clock;
  json outputs = json::object();
  auto done = [&](const fs::path& p) { outputs[run.relative(p)] = tree_digest(p); };

  const auto pool = motion_pool(cfg);
  const auto binary = synth::relabel_binary(pool, motion_partition());
  auto gen = cfg.motion_data.generator;
  gen.seed = stage_seed(cfg, Stage::kMotionTrain);
  const auto train = synth::synthesize_dataset(binary, gen, cfg.motion_data.train_sequences);
  synth::save_dataset(run.data("motion_train"), train);
  done(run.data("motion_train"));
  gen.seed = stage_seed(cfg, Stage::kMotionTest);
  synth::save_dataset(run.data("motion_test"), synth::synthesize_dataset(binary, gen, cfg.motion_data.test_sequences));
  done(run.data("motion_test"));
  spdlog::info("motion data: {} train / {} test sequences, motion fraction {:.3f}", cfg.motion_data.train_sequences,
               cfg.motion_data.test_sequences, train.summary.motion_fraction);

  recog::save_labeled_segments(run.data("pretrain"),
                               to_segments(synth::make_labeled_clips(
                                   synth::pretraining_labels(),
                                   clip_config(cfg.pretrain_clips, stage_seed(cfg, Stage::kPretrainClips)))));
  done(run.data("pretrain"));
  recog::save_labeled_segments(
      run.data("shots"),
      to_segments(synth::make_labeled_clips(cfg.labels, clip_config(cfg.shot_clips, stage_seed(cfg, Stage::kShotClips)))));
  done(run.data("shots"));
  recog::save_labeled_segments(
      run.data("recog_test"),
      to_segments(synth::make_labeled_clips(cfg.labels, clip_config(cfg.test_clips, stage_seed(cfg, Stage::kTestClips)))));
  done(run.data("recog_test"));

  quality::save_scored_samples(run.data("scored_train"),
                               to_scored(synth::make_scored_clips(
                                   cfg.labels, clip_config(cfg.scored_clips, stage_seed(cfg, Stage::kScoredClips)))));
  done(run.data("scored_train"));
  quality::save_scored_samples(
      run.data("scored_test"),
      to_scored(synth::make_scored_clips(cfg.labels,
                                         clip_config(cfg.scored_test_clips, stage_seed(cfg, Stage::kScoredTestClips)))));
  done(run.data("scored_test"));

  const auto scripts = synth::load_scripts(cfg.session_scripts.string());
  std::vector<synth::SimulatedSession> sessions;
  synth::SessionConfig sc;
  sc.blend_width = cfg.session_blend_width;
  sc.seed = stage_seed(cfg, Stage::kSessions);
  for (const auto& s : scripts) sessions.push_back(synth::simulate_class_session(s, pool, sc));
  synth::save_session_fixture(run.data("sessions"), scripts, sessions);
  done(run.data("sessions"));

  spdlog::info("synth finished in {:.1f} s", clock.seconds());
  run.record("synth", {{"outputs", outputs}, {"motion_summary", train.summary}});
}

void cmd_train_md(const RunConfig& cfg, RunDirectory& run) {
  Stopwatch clock;
  const auto ds = synth::load_dataset(run.data("motion_train"));
  spdlog::info("training detector on {} sequences for {} epochs", ds.signals.size(), cfg.detector_train.epochs);
  const auto model = motion::train_detector(ds.signals, ds.masks, cfg.detector_train, cfg.detector_arch);
  fs::create_directories(run.checkpoint(""));
  model.save(run.checkpoint(kDetectorFile));
  spdlog::info("detector trained in {:.1f} s", clock.seconds());
  const auto& rec = model.training();
  run.record("train-md", {{"checkpoint", checkpoint_entry(run, run.checkpoint(kDetectorFile))},
                          {"inputs", {{"data/motion_train", tree_digest(run.data("motion_train"))}}},
                          {"loss_curve", rec.loss_curve},
                          {"validation_curve", rec.validation_curve}});
}

void cmd_pretrain_ar(const RunConfig& cfg, RunDirectory& run) {
  Stopwatch clock;
  const auto data = recog::load_labeled_segments(run.data("pretrain") / "manifest.csv");
  const auto text_seed = cfg.text_seed.value_or(stage_seed(cfg, Stage::kText));
  const auto provider =
      cfg.text_table ? recog::TextEmbeddingProvider::from_table(*cfg.text_table)
                     : recog::TextEmbeddingProvider::seeded(text_seed, static_cast<std::size_t>(cfg.encoder_arch.dim));
  fs::create_directories(run.checkpoint(""));
  if (!cfg.text_table) {
    std::vector<std::string> all = synth::pretraining_labels();
    for (const auto& l : cfg.labels)
      if (std::find(all.begin(), all.end(), l) == all.end()) all.push_back(l);
    provider.save_table(run.checkpoint(kTextFile), recog::LabelSet(all));
  }

  recog::SignalEncoder encoder(cfg.encoder_arch, stage_seed(cfg, Stage::kEncoderInit));
  recog::EncoderRecord rec;
  spdlog::info("contrastive pretraining on {} segments for {} epochs", data.size(), cfg.pretrain.epochs);
  encoder = recog::pretrain_contrastive(std::move(encoder), data, provider, cfg.pretrain, &rec);
  recog::save_encoder(run.checkpoint(kPretrainedFile), encoder, {rec});
  spdlog::info("pretraining finished in {:.1f} s", clock.seconds());

  json entry = {{"checkpoint", checkpoint_entry(run, run.checkpoint(kPretrainedFile))},
                {"inputs", {{"data/pretrain", tree_digest(run.data("pretrain"))}}},
                {"record", encoder_record_json(rec)}};
  if (!cfg.text_table) entry["text_embeddings"] = checkpoint_entry(run, run.checkpoint(kTextFile));
  run.record("pretrain-ar", entry);
}

void cmd_finetune_ar(const RunConfig& cfg, RunDirectory& run) {
  Stopwatch clock;
  require_artifact(run.checkpoint(kPretrainedFile), "pretrained encoder checkpoint", "pretrain-ar");
  std::vector<recog::EncoderRecord> history;
  auto encoder = recog::load_encoder(run.checkpoint(kPretrainedFile), &history);
  const auto provider = load_text(cfg, run);
  const recog::LabelSet labels(cfg.labels);
  const auto shots =
      recog::take_kshot(recog::load_labeled_segments(run.data("shots") / "manifest.csv"), labels, cfg.k_shot);

  encoder.inject_lora(cfg.lora);
  const auto base_before = encoder.base_hash();
  recog::EncoderRecord rec;
  spdlog::info("{}-shot fine-tuning of rank-{} adapters on {} labels", cfg.k_shot, cfg.lora.rank, labels.size());
  encoder = recog::finetune_kshot(std::move(encoder), shots, labels, cfg.k_shot, provider, cfg.finetune, &rec);
  if (encoder.base_hash() != base_before)
    throw Error(ErrorCode::kFrozenParameter, "fine-tuning changed frozen base weights", "encoder");
  history.push_back(rec);
  recog::save_encoder(run.checkpoint(kEncoderFile), encoder, history);
  spdlog::info("fine-tuning finished in {:.1f} s", clock.seconds());
  run.record("finetune-ar", {{"checkpoint", checkpoint_entry(run, run.checkpoint(kEncoderFile))},
                             {"base_sha256", base_before},
                             {"inputs", {{"data/shots", tree_digest(run.data("shots"))}}},
                             {"record", encoder_record_json(rec)}});
}

void cmd_train_aqa(const RunConfig& cfg, RunDirectory& run) {
  Stopwatch clock;
  require_artifact(run.checkpoint(kEncoderFile), "fine-tuned encoder checkpoint", "finetune-ar");
  const auto encoder = recog::load_encoder(run.checkpoint(kEncoderFile));
  const auto provider = load_text(cfg, run);
  const auto samples = quality::load_scored_manifest(run.data("scored_train") / "manifest.csv");
  quality::ScorerRecord rec;
  spdlog::info("training scorer on {} samples for {} epochs", samples.size(), cfg.scorer_train.epochs);
  const auto scorer = quality::train_scorer(samples, encoder, provider, cfg.scorer_train, &rec);
  quality::save_scorer(run.checkpoint(kScorerFile), scorer, rec);
  spdlog::info("scorer trained in {:.1f} s", clock.seconds());
  run.record("train-aqa", {{"checkpoint", checkpoint_entry(run, run.checkpoint(kScorerFile))},
                           {"inputs", {{"data/scored_train", tree_digest(run.data("scored_train"))}}},
                           {"loss_curve", rec.loss_curve},
                           {"validation_mse", rec.validation_mse},
                           {"baseline_mse", rec.baseline_mse}});
}

void cmd_infer(const RunConfig& cfg, RunDirectory& run, const std::vector<fs::path>& signal_paths,
               unsigned threads) {
  Stopwatch clock;
  const auto models = load_models(cfg, run);
  auto paths = signal_paths;
  if (paths.empty()) {
    paths = sorted_files(run.data("sessions") / "signals", ".csv");
    if (paths.empty())
      throw Error(ErrorCode::kMissingArtifact, "no signals given and no session signals found (run `synth` first)",
                  run.data("sessions").string());
  }
  std::vector<signal::SignalSequence> seqs;
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    seqs.push_back(signal::ingest_signal(p));
    ids.push_back(student_id_for(seqs.back(), p));
    if (!seen.insert(ids.back()).second)
      throw Error(ErrorCode::kDuplicateId, fmt::format("two signals share student id '{}'", ids.back()), ids.back());
  }

  const auto results = pipeline::analyze_many(models, seqs, cfg.analyze, threads);
  std::vector<pipeline::StudentStats> students;
  json outputs = json::object();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const double duration = static_cast<double>(seqs[i].size()) / seqs[i].rate();
    const pipeline::Timeline t{ids[i], seqs[i].rate(), results[i], duration};
    const auto path = run.path() / "timelines" / (ids[i] + ".json");
    fs::create_directories(path.parent_path());
    pipeline::save_timeline(path, t);
    outputs[run.relative(path)] = sha256_file(path);
    students.push_back(pipeline::aggregate_student(ids[i], results[i], duration));
    spdlog::info("{}: {} actions, active {:.1f}%", ids[i], results[i].size(), 100.0 * students.back().active_fraction);
  }
  const auto stats = pipeline::aggregate_class(std::move(students));
  const auto stats_path = run.path() / "stats" / "class_stats.json";
  fs::create_directories(stats_path.parent_path());
  pipeline::save_class_stats(stats_path, stats);
  outputs[run.relative(stats_path)] = sha256_file(stats_path);
  spdlog::info("inference on {} signals finished in {:.1f} s", seqs.size(), clock.seconds());

  json inputs = json::object();
  for (const auto& p : paths) inputs[p.filename().string()] = sha256_file(p);
  run.record("infer", {{"checkpoints",
                        {{"detector", sha256_file(run.checkpoint(kDetectorFile))},
                         {"encoder", sha256_file(run.checkpoint(kEncoderFile))},
                         {"scorer", sha256_file(run.checkpoint(kScorerFile))}}},
                       {"inputs", inputs},
                       {"outputs", outputs}});
}

void cmd_report(const RunConfig& cfg, RunDirectory& run, const std::vector<fs::path>& timeline_paths,
                const std::optional<fs::path>& plan_path) {
  auto paths = timeline_paths;
  if (paths.empty()) {
    paths = sorted_files(run.path() / "timelines", ".json");
    if (paths.empty())
      throw Error(ErrorCode::kMissingArtifact, "no timelines given and none found (run `infer` first)",
                  (run.path() / "timelines").string());
  }
  const auto tmpl = report::PromptTemplate::load(cfg.report_template);
  const auto plan = report::load_lesson_plan(plan_path.value_or(cfg.lesson_plan));
  const auto examples = cfg.examples ? report::load_examples(*cfg.examples) : std::vector<std::string>{};
  auto client = report::make_client(cfg.llm);

  std::vector<pipeline::StudentStats> students;
  for (const auto& p : paths) {
    const auto t = pipeline::load_timeline(p);
    const double duration = t.duration_s > 0.0 ? t.duration_s : (t.triplets.empty() ? 0.0 : t.triplets.back().end_s);
    students.push_back(pipeline::aggregate_student(t.student_id, t.triplets, duration));
  }
  const auto stats = pipeline::aggregate_class(students);

  const auto dir = run.path() / "reports";
  json outputs = json::object();
  auto emit = [&](const std::string& prompt, report::Audience audience, const std::string& subject,
                  const std::string& stem) {
    const auto r = report::generate_report(*client, prompt, audience, subject, cfg.generation);
    const auto md = report::save_report(r, dir, stem);
    outputs[run.relative(md)] = {{"sha256", sha256_file(md)}, {"prompt_sha256", r.prompt_hash}};
  };
  for (const auto& s : stats.students)
    emit(report::build_individual_prompt(tmpl, plan, s, examples, report::Audience::kStudent),
         report::Audience::kStudent, s.student_id, s.student_id);
  emit(report::build_class_prompt(tmpl, plan, stats, examples), report::Audience::kTeacher, cfg.class_id,
       cfg.class_id);
  spdlog::info("wrote {} individual reports and 1 class report to {}", stats.students.size(), dir.string());
  run.record("report", {{"client", client->id()},
                        {"template", {{"id", tmpl.id()}, {"version", tmpl.version()}}},
                        {"outputs", outputs}});
}

void cmd_eval(const RunConfig& cfg, RunDirectory& run, const std::string& split) {
  if (split != "test" && split != "train")
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown split '{}'", split), "split");
  const bool test = split == "test";
  const auto metrics = run.path() / "metrics";
  json summary = json::object();

  require_artifact(run.checkpoint(kDetectorFile), "detector checkpoint", "train-md");
  const auto detector = motion::Detector::load(run.checkpoint(kDetectorFile));
  const auto ds = synth::load_dataset(run.data(test ? "motion_test" : "motion_train"));
  json md = json::object();
  for (std::size_t divisor : {1u, 2u, 4u}) {
    const auto window = signal::WindowConfig::with_overlap(detector.window().length, divisor);
    std::vector<synth::MotionMask> predicted;
    for (const auto& s : ds.signals) {
      const auto probs = motion::detect(detector, s, window);
      predicted.push_back(motion::intervals_to_mask(
          motion::extract_segments(probs.values, {cfg.analyze.segments.threshold, 1, 0}), s.size()));
    }
    md[fmt::format("step_1_{}", divisor)] = motion::to_json(motion::eval_detection(predicted, ds.masks));
  }
  write_json(metrics / "motion.json", md);
  summary["motion_f1"] = md["step_1_4"]["frame"]["f1"];

  const auto models = load_models(cfg, run);
  const auto recog_set = test ? recog::load_labeled_segments(run.data("recog_test") / "manifest.csv")
                              : recog::take_kshot(recog::load_labeled_segments(run.data("shots") / "manifest.csv"),
                                                  models.labels, cfg.k_shot);
  const auto rr = recog::eval_recognition(models.encoder, models.provider, recog_set, models.labels);
  write_json(metrics / "recognition.json", recog::to_json(rr));
  recog::save_confusion_csv(metrics / "confusion.csv", rr);
  summary["recognition_accuracy"] = rr.accuracy;

  const auto scored = quality::load_scored_manifest(run.data(test ? "scored_test" : "scored_train") / "manifest.csv");
  const auto qs = quality::eval_scorer(models.scorer, scored, models.encoder, models.provider);
  write_json(metrics / "quality.json", quality::to_json(qs));
  summary["quality_mse"] = qs.mse;
  summary["quality_pearson"] = qs.pearson;

  const auto gold = synth::load_session_gold(run.data("sessions"));
  json sessions = json::array();
  std::size_t gold_total = 0, matched = 0;
  for (const auto& g : gold) {
    const auto seq = signal::ingest_signal(run.data("sessions") / "signals" / (g.student_id + ".csv"));
    const auto predicted = pipeline::analyze_sequence(models, seq, cfg.analyze);
    const auto m = pipeline::match_triplets(g.triplets, predicted);
    gold_total += m.gold;
    matched += m.matched;
    sessions.push_back({{"student_id", g.student_id}, {"gold", m.gold}, {"matched", m.matched},
                        {"predicted", predicted.size()}});
  }
  const double recovered = gold_total ? static_cast<double>(matched) / static_cast<double>(gold_total) : 0.0;
  write_json(metrics / "pipeline.json", {{"sessions", sessions}, {"gold", gold_total}, {"matched", matched},
                                         {"recall", recovered}});
  summary["pipeline_recall"] = recovered;

  spdlog::info("motion F1 {:.4f}, recognition accuracy {:.4f}, quality MSE {:.4f} / Pearson {:.4f}, "
               "session triplets recovered {}/{}",
               summary["motion_f1"].get<double>(), rr.accuracy, qs.mse, qs.pearson, matched, gold_total);
  run.record("eval", {{"split", split}, {"summary", summary}});
}

}  // namespace kinesis::cli
