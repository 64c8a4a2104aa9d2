#include "tsel/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "tsel/errors.hpp"
#include "tsel/rng.hpp"

namespace tsel {

namespace {

std::string topic_name(int t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%03d", t);
    return buf;
}

std::string system_name(int s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "sys%02d", s);
    return buf;
}

std::string doc_name(int t, int d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_d%04d", topic_name(t).c_str(), d);
    return buf;
}

} // namespace

SynthCollection generate_collection(const SynthConfig& config) {
    if (config.n_topics < 1 || config.n_systems < 2 || config.list_depth < 3)
        throw ConfigError("synthetic collection needs >= 1 topic, >= 2 systems, depth >= 3");

    SynthCollection out;

    // graded system quality, varied across topic aspects: a system good at
    // one family of topics is not equally good at another, so informative
    // topics of different aspects stay complementary
    constexpr int kAspects = 4;
    Rng quality_rng(derive_seed(config.seed, 0x0A11ull));
    std::vector<std::array<double, kAspects>> quality(
        static_cast<std::size_t>(config.n_systems));
    for (int s = 0; s < config.n_systems; ++s) {
        const double base =
            config.n_systems == 1
                ? 0.6
                : 0.9 - 0.65 * static_cast<double>(s) / static_cast<double>(config.n_systems - 1);
        for (int a = 0; a < kAspects; ++a) {
            const double q = base + 0.15 * quality_rng.gauss();
            quality[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] =
                std::clamp(q, 0.05, 1.0);
        }
    }

    out.runs.runs.resize(static_cast<std::size_t>(config.n_systems));
    for (int s = 0; s < config.n_systems; ++s)
        out.runs.runs[static_cast<std::size_t>(s)].system_id = system_name(s);

    // universe much larger than one list so pool sizes can vary by topic:
    // consensus topics pool small, noisy topics spread wide
    const int universe = 8 * config.list_depth;
    for (int t = 0; t < config.n_topics; ++t) {
        Rng topic_rng(derive_seed(config.seed, 0x701Cull, static_cast<std::uint64_t>(t)));
        const TopicId topic = topic_name(t);
        out.runs.topics.push_back(topic);

        // discriminative power is bimodal: a minority of topics cleanly
        // separates systems by quality, the rest are mostly noise
        const double u = topic_rng.uniform();
        const double u2 = topic_rng.uniform();
        const bool informative = u < 0.55;
        const double discrimination = informative ? 0.72 + 0.25 * u2 : 0.05 * u2;
        const int aspect = static_cast<int>(topic_rng.below(kAspects));
        // informative topics carry a substantial relevant set; hard topics
        // have few relevant docs and low ability for every system, so they
        // barely move the all-topics ranking
        const int n_relevant =
            informative ? std::max(4, static_cast<int>(std::floor(
                                          (0.35 + 0.25 * topic_rng.uniform()) *
                                          config.list_depth)))
                        : 2 + static_cast<int>(topic_rng.below(5));

        std::vector<int> relevant(static_cast<std::size_t>(universe), 0);
        for (std::size_t idx : topic_rng.sample_indices(static_cast<std::size_t>(universe),
                                                        static_cast<std::size_t>(n_relevant)))
            relevant[idx] = 1;

        std::set<std::string> pooled;
        for (int s = 0; s < config.n_systems; ++s) {
            Rng list_rng(derive_seed(config.seed, 0x11C7ull, static_cast<std::uint64_t>(t),
                                     static_cast<std::uint64_t>(s)));
            // residual ability on uninformative topics is low for everyone
            const double skill =
                discrimination *
                    quality[static_cast<std::size_t>(s)][static_cast<std::size_t>(aspect)] +
                (1.0 - discrimination) * 0.15 * list_rng.uniform();
            std::vector<RunEntry> scored(static_cast<std::size_t>(universe));
            for (int d = 0; d < universe; ++d) {
                const double noise = list_rng.gauss();
                scored[static_cast<std::size_t>(d)] = {
                    doc_name(t, d),
                    3.2 * skill * relevant[static_cast<std::size_t>(d)] + 0.6 * noise};
            }
            std::stable_sort(scored.begin(), scored.end(),
                             [](const RunEntry& a, const RunEntry& b) { return a.score > b.score; });
            scored.resize(static_cast<std::size_t>(config.list_depth));
            for (const auto& e : scored) pooled.insert(e.doc_id);
            out.runs.runs[static_cast<std::size_t>(s)].lists[topic] = std::move(scored);
        }

        // pooled documents are judged; everything else stays unjudged
        for (const auto& doc : pooled) {
            const int d = std::stoi(doc.substr(doc.find("_d") + 2));
            out.qrels.set(topic, doc, relevant[static_cast<std::size_t>(d)]);
        }
    }
    std::sort(out.runs.topics.begin(), out.runs.topics.end());

    if (config.n_groups > 0) {
        for (int s = 0; s < config.n_systems; ++s) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "g%02d", s % config.n_groups);
            out.groups.group_of[system_name(s)] = buf;
        }
    }
    return out;
}

void write_collection(const SynthCollection& collection, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& run : collection.runs.runs)
        write_run_file(run, dir + "/" + run.system_id + ".run");
    write_qrels_file(collection.qrels, dir + "/qrels.txt");
    if (!collection.groups.group_of.empty()) {
        std::ofstream out(dir + "/groups.csv", std::ios::binary);
        if (!out) throw ConfigError("cannot write " + dir + "/groups.csv");
        out << "system_id,group_id\n";
        for (const auto& [system_id, group_id] : collection.groups.group_of)
            out << system_id << ',' << group_id << '\n';
    }
}

} // namespace tsel
