#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "cursive/corpus.hpp"
#include "cursive/pipeline.hpp"

namespace cursive {

// Human cut labels, persisted as an append-only JSON-lines log. Each line is
// {"op":"put"|"delete","word_id","column","label","ts"}. Replaying the log in
// order gives the current state (last write wins). compact() rewrites the log
// as one "put" per live label, sorted by key.
class LabelStore {
public:
    struct Entry {
        CutLabel label = CutLabel::unlabeled;
        std::int64_t timestamp = 0;  // milliseconds since the epoch

        friend bool operator==(const Entry&, const Entry&) = default;
    };
    using Key = std::pair<std::string, int>;

    // Creates the file when missing. A torn final line (interrupted append) is
    // dropped; any other malformed line is a FormatError.
    explicit LabelStore(std::filesystem::path file);

    // Both return only once the log line is on disk (fsync).
    void put(const std::string& word_id, int column, CutLabel label);
    bool erase(const std::string& word_id, int column);

    std::optional<Entry> get(const std::string& word_id, int column) const;
    std::map<Key, Entry> snapshot() const;
    std::size_t size() const;

    void compact();
    const std::filesystem::path& path() const { return file_; }

private:
    void append_line(const std::string& line);

    std::filesystem::path file_;
    mutable std::shared_mutex mu_;
    std::map<Key, Entry> labels_;
};

struct ServiceOptions {
    std::filesystem::path corpus_dir;
    std::filesystem::path labels_file;
    std::filesystem::path export_path;  // default: <labels_file dir>/training.jsonl
    std::filesystem::path static_dir;   // optional UI assets served at /
    PipelineOptions pipeline;
};

// HTTP backend for labelling candidate cuts. Candidate columns are the
// heuristic_valid cuts of each word's preprocessed image, which is also the
// image served by /api/words/{id}/image.
class AnnotationService {
public:
    explicit AnnotationService(ServiceOptions opts);
    ~AnnotationService();
    AnnotationService(const AnnotationService&) = delete;
    AnnotationService& operator=(const AnnotationService&) = delete;

    // Binds 127.0.0.1; port 0 picks a free port. Returns the bound port.
    int bind(int port);
    // Blocks until stop().
    void listen();
    void stop();
    void wait_until_ready() const;

    const LabelStore& store() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cursive
