#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cursive/image.hpp"
#include "cursive/neural.hpp"
#include "cursive/pipeline.hpp"

namespace cursive {

enum class CutLabel { unlabeled, valid, invalid };

std::string_view to_string(CutLabel l);
CutLabel cut_label_from_string(std::string_view s);

struct LabeledCut {
    int column = 0;
    CutLabel label = CutLabel::unlabeled;

    friend bool operator==(const LabeledCut&, const LabeledCut&) = default;
};

// One word of a corpus. Ground-truth boundaries are columns of the source
// image; labelled cut columns live in the preprocessed (upright, cropped) frame
// the segmenter works in.
struct WordRecord {
    std::string word_id;
    std::filesystem::path image_path;
    std::vector<int> gt_boundaries;
    std::vector<LabeledCut> cuts;
    std::string split = "test";  // "train" or "test"

    friend bool operator==(const WordRecord&, const WordRecord&) = default;
};

inline constexpr const char* kManifestName = "manifest.jsonl";

nlohmann::json record_to_json(const WordRecord& r, const std::filesystem::path& base);
WordRecord record_from_json(const nlohmann::json& j, const std::filesystem::path& base);

// Reads <dir>/manifest.jsonl; image paths are resolved against dir and must exist.
std::vector<WordRecord> load_corpus(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const std::vector<WordRecord>& records);

enum class Glyph { ring, arch, double_arch, cup, double_cup, bar };
std::string_view to_string(Glyph g);

struct SynthOptions {
    std::vector<Glyph> alphabet{Glyph::ring, Glyph::arch, Glyph::double_arch, Glyph::cup, Glyph::double_cup, Glyph::bar};
    int min_glyphs = 3;
    int max_glyphs = 8;
    std::string split = "test";
};

struct SynthWord {
    WordRecord record;
    GrayImage image;
    std::vector<Glyph> glyphs;
    int baseline = 0;
    int core_top = 0;
};

// Cursive-like words: stroke glyphs joined by one-pixel ligatures on the
// baseline. Each ground-truth boundary is the middle column of a ligature.
// The output depends only on the arguments.
std::vector<SynthWord> synthesize_corpus(std::uint64_t seed, int word_count, const SynthOptions& opts = {});

// Writes word_<id>.pgm files and the manifest.
std::vector<WordRecord> write_corpus(const std::filesystem::path& dir, const std::vector<SynthWord>& words);

// Ground-truth columns mapped into the preprocessed frame of `pre`.
std::vector<int> map_ground_truth(const std::vector<int>& gt, const Preprocessed& pre);

// Labels each heuristic_valid cut valid when it lies within `tolerance` of a
// ground-truth boundary, invalid otherwise.
std::vector<LabeledCut> label_from_ground_truth(const GrayImage& img, const std::vector<int>& gt,
                                                const PipelineOptions& opts, int tolerance);

struct SegScore {
    double rate = 0.0;  // percent of ground-truth boundaries hit
    int hits = 0;
    int over_seg = 0;
    int missed = 0;
};

// Greedy one-to-one matching in column order within +-tolerance. A word with
// no ground-truth boundaries scores 100%.
SegScore seg_rate(std::vector<int> predicted, std::vector<int> gt, int tolerance = 3);

struct WordEval {
    std::string word_id;
    std::string split;
    int gt_count = 0;
    int predicted = 0;
    SegScore score;
};

struct EvalReport {
    int word_count = 0;
    int points = 0;  // ground-truth segmentation points
    std::optional<double> train_rate;
    std::optional<double> test_rate;
    int over_seg = 0;
    int missed = 0;
    std::vector<WordEval> words;
};

struct EvalOptions {
    PipelineOptions pipeline;
    int tolerance = 3;
    int jobs = 1;
    bool trace_paths = true;
};

// Per-word rates averaged without weighting, separately for each split.
EvalReport evaluate_pipeline(const std::vector<WordRecord>& corpus, const EnsembleModel& model, const EvalOptions& opts);
EvalReport evaluate_heuristics(const std::vector<WordRecord>& corpus, const EvalOptions& opts);

std::string report_text(const EvalReport& r);
nlohmann::json report_json(const EvalReport& r);

struct TrainingRow {
    std::string word_id;
    int column = 0;
    std::vector<double> features;
    int label = 0;
};

// One row per labelled cut, ordered by (word_id, column).
std::vector<TrainingRow> build_training_set(const std::vector<WordRecord>& corpus, const PipelineOptions& opts);
// Writes the rows as JSON lines; errors when no cut is labelled.
std::size_t export_training_set(const std::vector<WordRecord>& corpus, const PipelineOptions& opts,
                                const std::filesystem::path& out);
std::vector<TrainingRow> load_training_set(const std::filesystem::path& path);
Dataset to_dataset(const std::vector<TrainingRow>& rows);

}  // namespace cursive
