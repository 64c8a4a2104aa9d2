#include "tsel/collection.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <zlib.h>

#include <json.hpp>

#include "tsel/errors.hpp"
#include "tsel/parallel.hpp"

namespace tsel {

namespace {

bool is_gzip(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    unsigned char magic[2] = {0, 0};
    f.read(reinterpret_cast<char*>(magic), 2);
    return f.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
}

// Reads a whole file into memory, inflating gzip content transparently.
std::string read_file(const std::string& path) {
    if (is_gzip(path)) {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (!gz) throw ConfigError("cannot open " + path);
        std::string out;
        char buf[1 << 16];
        int n;
        while ((n = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
        bool bad = n < 0;
        gzclose(gz);
        if (bad) throw DataError("gzip decode failed for " + path);
        return out;
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) fields.emplace_back(line.substr(start, i - start));
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& file, std::size_t line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, line, "bad numeric field '" + s + "'");
    }
}

long parse_int(const std::string& s, const std::string& file, std::size_t line) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(file, line, "bad integer field '" + s + "'");
    return v;
}

SystemRun parse_one_run(const std::string& path, int max_depth, ValidationReport& report) {
    const std::string content = read_file(path);
    SystemRun run;
    std::map<TopicId, std::set<std::string>> seen;
    bool sorted_warning_emitted = false;

    std::size_t line_no = 0;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 6)
            throw ParseError(path, line_no,
                             "expected 6 fields (topic Q0 doc rank score tag), got " +
                                 std::to_string(fields.size()));
        const TopicId& topic = fields[0];
        const std::string& doc = fields[2];
        parse_int(fields[3], path, line_no); // rank field must be numeric, value unused
        double score = parse_double(fields[4], path, line_no);
        const std::string& tag = fields[5];

        if (run.system_id.empty()) {
            run.system_id = tag;
        } else if (run.system_id != tag) {
            throw ParseError(path, line_no,
                             "run tag changed from '" + run.system_id + "' to '" + tag + "'");
        }
        if (!seen[topic].insert(doc).second)
            throw ParseError(path, line_no,
                             "duplicate document '" + doc + "' for topic " + topic);
        run.lists[topic].push_back({doc, score});
        if (!sorted_warning_emitted) {
            const auto& list = run.lists[topic];
            if (list.size() >= 2 && list[list.size() - 2].score < score) {
                report.warn(path, line_no,
                            "scores out of rank order for topic " + topic + "; re-sorted");
                sorted_warning_emitted = true;
            }
        }
    }
    if (run.system_id.empty())
        throw ParseError(path, 0, "empty run file");

    // Descending score, input order preserved on ties; truncate to max_depth.
    for (auto& [topic, list] : run.lists) {
        std::stable_sort(list.begin(), list.end(),
                         [](const RunEntry& a, const RunEntry& b) { return a.score > b.score; });
        if (static_cast<int>(list.size()) > max_depth)
            list.resize(static_cast<std::size_t>(max_depth));
    }
    return run;
}

} // namespace

std::size_t ValidationReport::warning_count() const {
    std::size_t n = 0;
    for (const auto& i : issues)
        if (i.severity == ValidationIssue::Severity::Warning) ++n;
    return n;
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    j["issues"] = nlohmann::json::array();
    for (const auto& i : issues) {
        nlohmann::json e;
        e["severity"] = i.severity == ValidationIssue::Severity::Warning ? "warning" : "error";
        e["file"] = i.file;
        e["line"] = i.line;
        e["message"] = i.message;
        j["issues"].push_back(e);
    }
    j["warning_count"] = warning_count();
    return j.dump(2);
}

bool RunSet::has_topic(const TopicId& t) const {
    return std::binary_search(topics.begin(), topics.end(), t);
}

void Qrels::set(const TopicId& topic, const std::string& doc, int rel) {
    by_topic_[topic][doc] = rel ? 1 : 0;
}

int Qrels::get(const TopicId& topic, const std::string& doc) const {
    auto t = by_topic_.find(topic);
    if (t == by_topic_.end()) return 0;
    auto d = t->second.find(doc);
    return d == t->second.end() ? 0 : d->second;
}

bool Qrels::is_judged(const TopicId& topic, const std::string& doc) const {
    auto t = by_topic_.find(topic);
    return t != by_topic_.end() && t->second.count(doc) > 0;
}

std::size_t Qrels::relevant_count(const TopicId& topic) const {
    auto t = by_topic_.find(topic);
    if (t == by_topic_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [doc, rel] : t->second) n += static_cast<std::size_t>(rel);
    return n;
}

std::size_t Qrels::judgment_count() const {
    std::size_t n = 0;
    for (const auto& [topic, docs] : by_topic_) n += docs.size();
    return n;
}

RunSet parse_runs(const std::vector<std::string>& paths, int max_depth) {
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    RunSet rs;
    rs.runs.resize(paths.size());
    std::vector<ValidationReport> reports(paths.size());
    std::vector<std::string> failures(paths.size());
    parallel_for(paths.size(), [&](std::size_t i) {
        try {
            rs.runs[i] = parse_one_run(paths[i], max_depth, reports[i]);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw DataError(f);
    for (auto& r : reports)
        for (auto& issue : r.issues) rs.report.issues.push_back(std::move(issue));

    std::set<std::string> ids;
    std::set<TopicId> topic_set;
    for (const auto& run : rs.runs) {
        if (!ids.insert(run.system_id).second)
            throw DataError("duplicate system id '" + run.system_id + "'");
        for (const auto& [topic, list] : run.lists) topic_set.insert(topic);
    }
    rs.topics.assign(topic_set.begin(), topic_set.end());

    // Every run covers every topic; absent lists become empty and are flagged.
    for (auto& run : rs.runs) {
        for (const auto& t : rs.topics) {
            if (!run.lists.count(t)) {
                run.lists[t] = {};
                rs.report.warn("", 0, "system " + run.system_id + " has no list for topic " + t);
            }
        }
    }
    return rs;
}

Qrels parse_qrels(const std::string& path, ValidationReport* report) {
    const std::string content = read_file(path);
    Qrels q;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 4)
            throw ParseError(path, line_no,
                             "expected 4 fields (topic 0 doc grade), got " +
                                 std::to_string(fields.size()));
        const TopicId& topic = fields[0];
        const std::string& doc = fields[2];
        long grade = parse_int(fields[3], path, line_no);
        if (grade < 0 && report)
            report->warn(path, line_no, "negative grade treated as non-relevant");
        if (q.is_judged(topic, doc) && report)
            report->warn(path, line_no, "duplicate judgment for (" + topic + ", " + doc + "); last wins");
        q.set(topic, doc, grade >= 1 ? 1 : 0);
    }
    return q;
}

Pool build_pool(const RunSet& runs, const TopicId& topic, int depth) {
    if (depth < 1) throw ConfigError("pool depth must be >= 1");
    if (!runs.has_topic(topic)) throw DataError("unknown topic '" + topic + "'");
    Pool pool;
    pool.topic = topic;
    pool.depth = depth;
    for (const auto& run : runs.runs) {
        const auto* list = run.list_for(topic);
        if (!list) continue;
        std::size_t n = std::min<std::size_t>(list->size(), static_cast<std::size_t>(depth));
        for (std::size_t i = 0; i < n; ++i) pool.docs.insert((*list)[i].doc_id);
    }
    return pool;
}

void write_run_file(const SystemRun& run, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    char buf[64];
    for (const auto& [topic, list] : run.lists) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", list[i].score);
            out << topic << " Q0 " << list[i].doc_id << ' ' << (i + 1) << ' ' << buf << ' '
                << run.system_id << '\n';
        }
    }
}

void write_qrels_file(const Qrels& qrels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    for (const auto& [topic, docs] : qrels.by_topic())
        for (const auto& [doc, rel] : docs)
            out << topic << " 0 " << doc << ' ' << rel << '\n';
}

void validate_collection(RunSet& runs, const Qrels& qrels) {
    for (const auto& t : runs.topics) {
        if (!qrels.by_topic().count(t))
            runs.report.warn("", 0, "topic " + t + " has no judgments; kept with zero relevant");
        else if (qrels.relevant_count(t) == 0)
            runs.report.warn("", 0, "topic " + t + " has judgments but zero relevant documents");
    }
}

} // namespace tsel
