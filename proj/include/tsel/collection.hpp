#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tsel {

using TopicId = std::string;

struct RunEntry {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const RunEntry&) const = default;
};

// One system's ranked lists, one list per topic, ordered by descending
// score (input order preserved on ties).
struct SystemRun {
    std::string system_id;
    std::map<TopicId, std::vector<RunEntry>> lists;

    const std::vector<RunEntry>* list_for(const TopicId& topic) const {
        auto it = lists.find(topic);
        return it == lists.end() ? nullptr : &it->second;
    }
};

struct ValidationIssue {
    enum class Severity { Warning, Error };
    Severity severity = Severity::Warning;
    std::string file;
    std::size_t line = 0; // 0 = not line-specific
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    void warn(std::string file, std::size_t line, std::string msg) {
        issues.push_back({ValidationIssue::Severity::Warning, std::move(file), line, std::move(msg)});
    }
    std::size_t warning_count() const;
    std::string to_json() const;
};

struct RunSet {
    std::vector<SystemRun> runs;
    std::vector<TopicId> topics; // sorted, deduplicated
    ValidationReport report;

    bool has_topic(const TopicId& t) const;
    std::size_t system_count() const { return runs.size(); }
};

// Binary relevance judgments. Graded input is binarized on load (g >= 1).
class Qrels {
public:
    void set(const TopicId& topic, const std::string& doc, int rel);
    int get(const TopicId& topic, const std::string& doc) const; // unjudged -> 0
    bool is_judged(const TopicId& topic, const std::string& doc) const;
    std::size_t relevant_count(const TopicId& topic) const;
    std::size_t judgment_count() const;

    const std::map<TopicId, std::map<std::string, int>>& by_topic() const { return by_topic_; }

private:
    std::map<TopicId, std::map<std::string, int>> by_topic_;
};

struct Pool {
    TopicId topic;
    int depth = 0;
    std::set<std::string> docs;
};

// TREC run format: "topic Q0 doc rank score tag", whitespace separated.
// Reads .gz files transparently. One SystemRun per file, keyed by tag.
RunSet parse_runs(const std::vector<std::string>& paths, int max_depth);

// TREC qrels format: "topic 0 doc grade". Grades are binarized at g >= 1;
// negative grades map to 0 with a warning.
Qrels parse_qrels(const std::string& path, ValidationReport* report = nullptr);

// Union of the top-`depth` documents over all systems for `topic`.
Pool build_pool(const RunSet& runs, const TopicId& topic, int depth);

// TREC-format writers (round-trip partners of the parsers above).
void write_run_file(const SystemRun& run, const std::string& path);
void write_qrels_file(const Qrels& qrels, const std::string& path);

// Cross-checks runs against qrels (topics with no judgments etc.) and
// appends findings to runs.report.
void validate_collection(RunSet& runs, const Qrels& qrels);

} // namespace tsel
