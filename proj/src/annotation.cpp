#include "cursive/annotation.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>

#include "httplib.h"
#include "json.hpp"

#include "cursive/error.hpp"
#include "cursive/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cursive {

// ---------------------------------------------------------------- LabelStore

namespace {

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string put_line(const std::string& word, int column, const LabelStore::Entry& e) {
    return json{{"op", "put"}, {"word_id", word}, {"column", column}, {"label", std::string(to_string(e.label))},
                {"ts", e.timestamp}}
        .dump();
}

// Writes all of `data` and flushes it to stable storage.
void write_durably(int fd, const std::string& data, const fs::path& file) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw IoError("write " + file.string() + ": " + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) throw IoError("fsync " + file.string() + ": " + std::strerror(errno));
}

class Fd {
public:
    Fd(const fs::path& p, int flags) : fd_(::open(p.c_str(), flags, 0644)) {
        if (fd_ < 0) throw IoError("open " + p.string() + ": " + std::strerror(errno));
    }
    ~Fd() { ::close(fd_); }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const { return fd_; }

private:
    int fd_;
};

}  // namespace

LabelStore::LabelStore(fs::path file) : file_(std::move(file)) {
    if (file_.empty()) throw IoError("empty label store path");
    if (!fs::exists(file_)) {
        if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
        Fd touch(file_, O_WRONLY | O_CREAT);
        return;
    }
    std::ifstream in(file_, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const bool ends_clean = text.empty() || text.back() == '\n';

    std::size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        const bool last = end == std::string::npos;
        if (last) end = text.size();
        const std::string line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string op = j.at("op").get<std::string>();
            Key key{j.at("word_id").get<std::string>(), j.at("column").get<int>()};
            if (op == "put") {
                const CutLabel label = cut_label_from_string(j.at("label").get<std::string>());
                if (label == CutLabel::unlabeled) throw FormatError("put with label 'unlabeled'");
                labels_[key] = Entry{label, j.value("ts", std::int64_t{0})};
            } else if (op == "delete") {
                labels_.erase(key);
            } else {
                throw FormatError("unknown op '" + op + "'");
            }
        } catch (const std::exception& err) {
            // An append cut short by a crash leaves one unterminated last line.
            if (last && !ends_clean) break;
            throw FormatError(file_.string() + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
}

void LabelStore::append_line(const std::string& line) {
    Fd fd(file_, O_WRONLY | O_APPEND | O_CREAT);
    write_durably(fd.get(), line + "\n", file_);
}

void LabelStore::put(const std::string& word_id, int column, CutLabel label) {
    if (label == CutLabel::unlabeled) throw InvalidArgument("put: use erase() to clear a label");
    std::unique_lock lock(mu_);
    const Entry e{label, now_ms()};
    append_line(put_line(word_id, column, e));
    labels_[{word_id, column}] = e;
}

bool LabelStore::erase(const std::string& word_id, int column) {
    std::unique_lock lock(mu_);
    const auto it = labels_.find({word_id, column});
    if (it == labels_.end()) return false;
    append_line(json{{"op", "delete"}, {"word_id", word_id}, {"column", column}, {"ts", now_ms()}}.dump());
    labels_.erase(it);
    return true;
}

std::optional<LabelStore::Entry> LabelStore::get(const std::string& word_id, int column) const {
    std::shared_lock lock(mu_);
    const auto it = labels_.find({word_id, column});
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

std::map<LabelStore::Key, LabelStore::Entry> LabelStore::snapshot() const {
    std::shared_lock lock(mu_);
    return labels_;
}

std::size_t LabelStore::size() const {
    std::shared_lock lock(mu_);
    return labels_.size();
}

void LabelStore::compact() {
    std::unique_lock lock(mu_);
    std::string text;
    for (const auto& [key, e] : labels_) text += put_line(key.first, key.second, e) + "\n";
    fs::path tmp = file_;
    tmp += ".tmp";
    {
        Fd fd(tmp, O_WRONLY | O_CREAT | O_TRUNC);
        write_durably(fd.get(), text, tmp);
    }
    fs::rename(tmp, file_);
    if (file_.has_parent_path()) {
        Fd dir(file_.parent_path(), O_RDONLY | O_DIRECTORY);
        ::fsync(dir.get());
    }
}

// ---------------------------------------------------------------- service

namespace {

struct WordEntry {
    WordRecord record;
    GrayImage source;
    GrayImage preprocessed;  // upright binarised word, ink 0
    int char_width = 0;
    std::vector<CandidateCut> cuts;

    bool is_candidate(int column) const {
        return std::any_of(cuts.begin(), cuts.end(),
                           [&](const CandidateCut& c) { return c.column == column && c.status == CutStatus::heuristic_valid; });
    }
};

constexpr const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>cursive-cut annotation</title></head>
<body>
<h1>cursive-cut annotation service</h1>
<p>No UI assets are installed. The JSON API is available under <code>/api/words</code>.</p>
</body></html>
)";

void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), "application/json");
}

}  // namespace

struct AnnotationService::Impl {
    ServiceOptions opts;
    LabelStore store;
    std::map<std::string, WordEntry> words;
    std::vector<std::string> order;
    httplib::Server server;
    std::mutex export_mu;

    explicit Impl(ServiceOptions o) : opts(std::move(o)), store(opts.labels_file) {
        if (opts.export_path.empty()) opts.export_path = opts.labels_file.parent_path() / "training.jsonl";
        for (auto& rec : load_corpus(opts.corpus_dir)) {
            WordEntry w;
            w.source = load_pgm(rec.image_path);
            const Preprocessed pre = preprocess(w.source);
            w.preprocessed = to_gray(pre.slant.image);
            auto heur = run_heuristics(pre.skeleton, opts.pipeline.seg);
            w.cuts = std::move(heur.cuts);
            w.char_width = heur.char_width;
            w.record = std::move(rec);
            const std::string id = w.record.word_id;
            if (!words.emplace(id, std::move(w)).second) throw FormatError("duplicate word_id '" + id + "'");
            order.push_back(id);
        }
        routes();
    }

    // Stored label first, then any label carried by the manifest.
    CutLabel label_of(const WordEntry& w, int column) const {
        if (auto e = store.get(w.record.word_id, column)) return e->label;
        for (const auto& c : w.record.cuts)
            if (c.column == column) return c.label;
        return CutLabel::unlabeled;
    }

    int labeled_count(const WordEntry& w) const {
        int n = 0;
        for (const auto& c : w.cuts)
            if (c.status == CutStatus::heuristic_valid && label_of(w, c.column) != CutLabel::unlabeled) ++n;
        return n;
    }

    const WordEntry* find(const std::string& id) const {
        const auto it = words.find(id);
        return it == words.end() ? nullptr : &it->second;
    }

    void routes() {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kIndexPage, "text/html"); });
        if (!opts.static_dir.empty() && !server.set_mount_point("/", opts.static_dir.string()))
            throw IoError("static asset directory not found: " + opts.static_dir.string());

        server.Get("/api/words", [this](const httplib::Request&, httplib::Response& res) {
            auto arr = json::array();
            for (const auto& id : order) {
                const WordEntry& w = words.at(id);
                int cut_count = 0;
                for (const auto& c : w.cuts) cut_count += c.status == CutStatus::heuristic_valid;
                arr.push_back({{"word_id", id},
                               {"width", w.preprocessed.width},
                               {"height", w.preprocessed.height},
                               {"labeled_count", labeled_count(w)},
                               {"cut_count", cut_count}});
            }
            res.set_content(arr.dump(), "application/json");
        });

        server.Get(R"(/api/words/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
            const WordEntry* w = find(req.matches[1]);
            if (!w) return send_error(res, 404, "unknown word");
            const std::string view = req.has_param("view") ? req.get_param_value("view") : "preprocessed";
            if (view != "preprocessed" && view != "source") return send_error(res, 400, "view must be preprocessed or source");
            const GrayImage& img = view == "source" ? w->source : w->preprocessed;
            const std::string accept = req.get_header_value("Accept");
            std::vector<std::uint8_t> bytes;
            std::string type;
            if (accept.find("image/png") != std::string::npos) {
                bytes = encode_png(img);
                type = "image/png";
            } else {
                bytes = encode_pgm(img);
                type = "image/x-portable-graymap";
            }
            res.set_content(std::string(bytes.begin(), bytes.end()), type);
        });

        server.Get(R"(/api/words/([^/]+)/cuts)", [this](const httplib::Request& req, httplib::Response& res) {
            const WordEntry* w = find(req.matches[1]);
            if (!w) return send_error(res, 404, "unknown word");
            json cuts = cuts_to_json(w->cuts);
            for (auto& c : cuts) {
                const int column = c["column"].get<int>();
                const bool candidate = c["status"] == "heuristic_valid";
                c["candidate"] = candidate;
                c["label"] = candidate ? std::string(to_string(label_of(*w, column))) : "unlabeled";
            }
            res.set_content(json{{"word_id", w->record.word_id},
                                 {"width", w->preprocessed.width},
                                 {"height", w->preprocessed.height},
                                 {"char_width", w->char_width},
                                 {"cuts", std::move(cuts)}}
                                .dump(),
                            "application/json");
        });

        server.Put(R"(/api/words/([^/]+)/cuts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const WordEntry* w = find(req.matches[1]);
            if (!w) return send_error(res, 404, "unknown word");
            const auto column = parse_column(req.matches[2]);
            if (!column) return send_error(res, 400, "column must be an integer");
            CutLabel label;
            try {
                const json body = json::parse(req.body);
                label = cut_label_from_string(body.at("label").get<std::string>());
                if (label == CutLabel::unlabeled) throw FormatError("label must be valid or invalid");
            } catch (const std::exception&) {
                return send_error(res, 400, "body must be {\"label\":\"valid\"|\"invalid\"}");
            }
            if (!w->is_candidate(*column)) return send_error(res, 409, "column is not a candidate cut");
            store.put(w->record.word_id, *column, label);
            res.status = 204;
        });

        server.Delete(R"(/api/words/([^/]+)/cuts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const WordEntry* w = find(req.matches[1]);
            if (!w) return send_error(res, 404, "unknown word");
            const auto column = parse_column(req.matches[2]);
            if (!column) return send_error(res, 400, "column must be an integer");
            if (!w->is_candidate(*column)) return send_error(res, 404, "unknown column");
            store.erase(w->record.word_id, *column);
            res.status = 204;
        });

        server.Post("/api/export", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(export_mu);
            std::vector<WordRecord> corpus;
            for (const auto& id : order) {
                const WordEntry& w = words.at(id);
                WordRecord r = w.record;
                r.cuts.clear();
                for (const auto& c : w.cuts) {
                    if (c.status != CutStatus::heuristic_valid) continue;
                    const CutLabel l = label_of(w, c.column);
                    if (l != CutLabel::unlabeled) r.cuts.push_back({c.column, l});
                }
                corpus.push_back(std::move(r));
            }
            try {
                const std::size_t rows = export_training_set(corpus, opts.pipeline, opts.export_path);
                res.set_content(json{{"rows", rows}, {"path", opts.export_path.string()}}.dump(), "application/json");
            } catch (const InvalidArgument& err) {
                send_error(res, 409, err.what());
            }
        });

        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& err) {
                send_error(res, 500, err.what());
            } catch (...) {
                send_error(res, 500, "internal error");
            }
        });
    }

    static std::optional<int> parse_column(const std::string& s) {
        if (s.empty() || s.size() > 9) return std::nullopt;
        std::size_t i = s[0] == '-' ? 1 : 0;
        if (i == s.size()) return std::nullopt;
        for (std::size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') return std::nullopt;
        return std::stoi(s);
    }
};

AnnotationService::AnnotationService(ServiceOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

AnnotationService::~AnnotationService() { stop(); }

int AnnotationService::bind(int port) {
    if (port < 0 || port > 65535) throw InvalidArgument("port out of range");
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port("127.0.0.1");
        if (bound < 0) throw IoError("cannot bind 127.0.0.1");
        return bound;
    }
    if (!impl_->server.bind_to_port("127.0.0.1", port)) throw IoError("cannot bind 127.0.0.1:" + std::to_string(port));
    return port;
}

void AnnotationService::listen() { impl_->server.listen_after_bind(); }

void AnnotationService::stop() {
    if (impl_) impl_->server.stop();
}

void AnnotationService::wait_until_ready() const { impl_->server.wait_until_ready(); }

const LabelStore& AnnotationService::store() const { return impl_->store; }

}  // namespace cursive
