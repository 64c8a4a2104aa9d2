#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tsel/collection.hpp"

namespace tsel::test {

// In-memory run set builder for hand-written fixtures.
inline RunSet make_runs(
    const std::vector<std::pair<std::string,
                                std::map<std::string, std::vector<std::pair<std::string, double>>>>>&
        systems) {
    RunSet rs;
    std::set<TopicId> topics;
    for (const auto& [system_id, lists] : systems) {
        SystemRun run;
        run.system_id = system_id;
        for (const auto& [topic, entries] : lists) {
            topics.insert(topic);
            for (const auto& [doc, score] : entries) run.lists[topic].push_back({doc, score});
        }
        rs.runs.push_back(std::move(run));
    }
    rs.topics.assign(topics.begin(), topics.end());
    for (auto& run : rs.runs)
        for (const auto& t : rs.topics)
            if (!run.lists.count(t)) run.lists[t] = {};
    return rs;
}

// Ranked list with synthetic descending scores, for when only order matters.
inline std::vector<std::pair<std::string, double>> ranked(const std::vector<std::string>& docs) {
    std::vector<std::pair<std::string, double>> entries;
    double score = static_cast<double>(docs.size());
    for (const auto& d : docs) entries.emplace_back(d, score--);
    return entries;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        dir_ = std::filesystem::temp_directory_path() / ("tsel_test_" + tag);
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() { std::filesystem::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    std::filesystem::path dir_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// O(n^2) pair-counting Kendall tau oracle, independent of the library's
// inversion-counting implementation.
inline double kendall_oracle(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    std::map<std::string, int> pa, pb;
    for (std::size_t i = 0; i < a.size(); ++i) pa[a[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < b.size(); ++i) pb[b[i]] = static_cast<int>(i);
    long concordant = 0, discordant = 0;
    for (const auto& [x, xa] : pa) {
        for (const auto& [y, ya] : pa) {
            if (x >= y) continue;
            const int da = xa - ya;
            const int db = pb.at(x) - pb.at(y);
            if ((da < 0) == (db < 0))
                ++concordant;
            else
                ++discordant;
        }
    }
    return static_cast<double>(concordant - discordant) /
           static_cast<double>(concordant + discordant);
}

} // namespace tsel::test
