// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pitchside/communities.hpp"
#include "pitchside/errors.hpp"
#include "pitchside/export.hpp"
#include "pitchside/graphs.hpp"
#include "pitchside/ingest.hpp"
#include "pitchside/metrics.hpp"
#include "pitchside/pipeline.hpp"
#include "pitchside/rng.hpp"
#include "pitchside/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pitchside;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

// ---- projection ------------------------------------------------------------

Outcome projection_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20240611);
  std::size_t mismatched = 0, total_edges = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t users = 2 + rng.below(39);
    const std::size_t tags = 2 + rng.below(29);
    const double fill = 0.05 + 0.3 * rng.uniform();
    const auto m = oracle::random_matrix(rng, users, tags, fill);
    ProjectionConfig cfg = trial % 2 == 0 ? ProjectionConfig::for_users()
                                          : ProjectionConfig::for_hashtags();
    cfg.rng_seed = 1000 + static_cast<std::uint64_t>(trial);
    cfg.binary = trial % 5 == 4;
    if (trial % 3 == 0) cfg.alpha = 0.1;
    const auto got = project_similarity(m, cfg);
    std::set<std::pair<std::uint32_t, std::uint32_t>> have;
    for (const auto& e : got.retained) have.insert({e.a, e.b});
    const auto want = oracle::projection(m, cfg);
    total_edges += want.size();
    if (have != want) ++mismatched;
  }
  const double secs = seconds_since(t0);
  return {mismatched == 0 && secs < 60.0,
          "50 matrices, " + std::to_string(mismatched) + " mismatched edge sets, " +
              std::to_string(total_edges) + " oracle edges, " + fmt(secs, 1) + " s"};
}

// ---- louvain -----------------------------------------------------------------

Outcome louvain_recovery() {
  std::size_t good = 0;
  bool monotone = true;
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 7919);
    auto [g, truth] = oracle::planted_partition(rng, 4, 30, 0.3, 0.01);
    const auto part = louvain(g, 1.0, seed);
    const double score = oracle::nmi(part.assignment, truth);
    worst = std::min(worst, score);
    if (score >= 0.95) ++good;
    for (std::size_t i = 1; i < part.pass_modularity.size(); ++i) {
      if (part.pass_modularity[i] < part.pass_modularity[i - 1] - 1e-12) monotone = false;
    }
  }
  return {good >= 19 && monotone, std::to_string(good) + "/20 seeds with NMI >= 0.95 (min " +
                                      fmt(worst) + "), modularity monotone: " +
                                      (monotone ? "yes" : "no")};
}

// ---- centrality ----------------------------------------------------------------

Outcome centrality_exactness() {
  Rng rng(99);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    const double p = (1.0 + 3.0 * rng.uniform()) / static_cast<double>(n);
    const auto g = oracle::random_graph(rng, n, p, trial % 2 == 0, 3);
    const auto got = betweenness(g);
    const auto want = oracle::betweenness(g);
    for (std::size_t v = 0; v < n; ++v) {
      const double rel = std::abs(got[v] - want[v]) / std::max(1.0, std::abs(want[v]));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  const bool betweenness_ok = worst_rel <= 1e-9;

  double worst_sum = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_graph(rng, 5 + rng.below(150), 0.05, trial % 2 == 0, 4);
    const auto pr = pagerank(g);
    double s = 0.0;
    for (double x : pr) s += x;
    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  }
  double worst_uniform = 0.0;
  for (std::size_t n : {3u, 7u, 50u}) {
    for (bool directed : {true, false}) {
      GraphBuilder b(directed);
      for (std::size_t i = 0; i < n; ++i) {
        b.add_edge(oracle::node_name(i), oracle::node_name((i + 1) % n), 1.0);
      }
      for (double x : pagerank(b.build())) {
        worst_uniform = std::max(worst_uniform, std::abs(x - 1.0 / static_cast<double>(n)));
      }
    }
  }
  const bool pagerank_ok = worst_sum <= 1e-9 && worst_uniform <= 1e-9;

  std::size_t core_mismatch = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(100);
    const auto g = oracle::random_graph(rng, n, 0.02 + 0.2 * rng.uniform(), trial % 3 == 0);
    for (std::size_t k = 1; k <= 12; ++k) {
      const auto core = k_core(g, k);
      const std::set<std::string> have(core.ids().begin(), core.ids().end());
      if (have != oracle::k_core_nodes(g, k)) ++core_mismatch;
    }
  }
  return {betweenness_ok && pagerank_ok && core_mismatch == 0,
          "betweenness max rel err " + fmt(worst_rel * 1e12, 3) + "e-12; pagerank |sum-1| " +
              fmt(worst_sum * 1e12, 3) + "e-12, cycle deviation " + fmt(worst_uniform * 1e12, 3) +
              "e-12; k-core mismatches " + std::to_string(core_mismatch) + "/240"};
}

// ---- extraction -------------------------------------------------------------------

TweetRecord tweet(std::string id, std::string user, std::string text, TweetKind kind,
                  std::vector<std::string> tags = {}, std::string target = {}) {
  TweetRecord r;
  r.tweet_id = std::move(id);
  r.user_id = std::move(user);
  r.text = std::move(text);
  r.kind = kind;
  r.hashtags = std::move(tags);
  r.timestamp = *parse_timestamp("2017-01-01T00:00:00Z");
  if (kind != TweetKind::original) {
    r.target_tweet_id = std::move(target);
    r.target_user_id = "someone";
  }
  return r;
}

std::set<std::string> ids_of(const ExtractionResult& ex) {
  std::set<std::string> s;
  for (const auto& r : ex.records) s.insert(r.tweet_id);
  return s;
}

// Hand-built corpora, one per extraction rule, with the expected subset.
std::vector<std::pair<std::string, bool>> extraction_fixtures(const Lexicon& lexicon) {
  using K = TweetKind;
  struct Fixture {
    std::string name;
    std::vector<TweetRecord> corpus;
    std::set<std::string> expected;
  };
  const std::vector<Fixture> fixtures = {
      {"hashtag match",
       {tweet("a", "u1", "great game", K::original, {"brexit"}),
        tweet("b", "u2", "great game", K::original, {"mufc"})},
       {"a"}},
      {"keyword word boundary",
       {tweet("a", "u1", "Corbyn at the match", K::original),
        tweet("b", "u2", "a corbynista in the stands", K::original),
        tweet("c", "u3", "club history made", K::original)},
       {"a"}},
      {"excluded term",
       {tweet("a", "u1", "go out and vote today", K::original)},
       {}},
      {"quoted parent included",
       {tweet("p", "u1", "what a goal", K::original),
        tweet("q", "u2", "labour would never", K::quote, {}, "p")},
       {"p", "q"}},
      {"replied-to parent included",
       {tweet("p", "u1", "match report", K::original),
        tweet("r", "u2", "tory nonsense", K::reply, {}, "p")},
       {"p", "r"}},
      {"downstream reply excluded",
       {tweet("t", "u1", "#ukip rally", K::original, {"ukip"}),
        tweet("r", "u2", "see you at the game", K::reply, {}, "t")},
       {"t"}},
      {"one hop only",
       {tweet("g", "u1", "kickoff", K::original),
        tweet("p", "u2", "lovely", K::reply, {}, "g"),
        tweet("q", "u3", "snp win", K::quote, {}, "p")},
       {"p", "q"}},
      {"missing parent",
       {tweet("q", "u1", "sturgeon again", K::quote, {}, "gone")},
       {"q"}},
      {"retweet parent not pulled in",
       {tweet("p", "u1", "nice", K::original),
        tweet("rt", "u2", "RT brexit chaos", K::retweet, {}, "p")},
       {"rt"}},
      {"empty corpus", {}, {}},
  };
  std::vector<std::pair<std::string, bool>> out;
  for (const auto& f : fixtures) {
    out.emplace_back(f.name, ids_of(extract_political_subset(f.corpus, lexicon)) == f.expected);
  }
  return out;
}

Outcome extraction_correctness() {
  std::size_t tp = 0, fp = 0, fn = 0, context = 0, downstream = 0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_users = 4000;
    cfg.n_tweets = 15000;
    cfg.campaigns = {HijackCampaign{200, 40, 0.01, 3, 1, "mufc"},
                     ActivismCampaign{150, 0.97, 2, 2},
                     MegaphoneCampaign{120, 30, 20, 1, 10}};
    const auto corpus = generate_corpus(cfg);
    const auto lexicon = corpus.lexicon.build();

    // Expected subset from the generator's labels: political by construction
    // plus the present parents of political quotes and replies.
    std::map<std::string, const TweetRecord*> by_id;
    for (const auto& r : corpus.records) by_id[r.tweet_id] = &r;
    std::set<std::string> expected;
    for (const auto& r : corpus.records) {
      if (!corpus.truth.political_tweets.contains(r.tweet_id)) continue;
      expected.insert(r.tweet_id);
      if ((r.kind == TweetKind::quote || r.kind == TweetKind::reply) &&
          by_id.contains(*r.target_tweet_id)) {
        expected.insert(*r.target_tweet_id);
        if (!corpus.truth.political_tweets.contains(*r.target_tweet_id)) ++context;
      }
    }
    for (const auto& r : corpus.records) {
      if (r.kind == TweetKind::reply && !corpus.truth.political_tweets.contains(r.tweet_id) &&
          corpus.truth.political_tweets.contains(*r.target_tweet_id)) {
        ++downstream;
      }
    }
    const auto got = ids_of(extract_political_subset(corpus.records, lexicon));
    for (const auto& id : got) (expected.contains(id) ? tp : fp)++;
    for (const auto& id : expected) fn += got.contains(id) ? 0 : 1;
  }
  const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;

  const auto fixtures = extraction_fixtures(starter_lexicon().build());
  std::size_t fixtures_ok = 0;
  std::string failed;
  for (const auto& [name, ok] : fixtures) {
    if (ok) {
      ++fixtures_ok;
    } else {
      failed += " [" + name + "]";
    }
  }
  return {fp == 0 && fn == 0 && context > 0 && downstream > 0 && fixtures_ok == fixtures.size(),
          "precision " + fmt(precision, 4) + ", recall " + fmt(recall, 4) + " over 3 corpora (" +
              std::to_string(context) + " context parents, " + std::to_string(downstream) +
              " downstream replies); fixtures " + std::to_string(fixtures_ok) + "/" +
              std::to_string(fixtures.size()) + failed};
}

// ---- corpus summary shape -------------------------------------------------------

Outcome table_shape() {
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.n_tweets = 50000;
  cfg.campaigns = {HijackCampaign{}, ActivismCampaign{}, MegaphoneCampaign{}};
  const auto corpus = generate_corpus(cfg);
  const auto lexicon = corpus.lexicon.build();
  const auto summary = summarize(corpus.records, &lexicon);
  const std::map<TweetKind, double> target = {{TweetKind::original, 0.44},
                                              {TweetKind::retweet, 0.35},
                                              {TweetKind::quote, 0.14},
                                              {TweetKind::reply, 0.07}};
  double worst = 0.0;
  std::string shares;
  for (const auto& [kind, want] : target) {
    const double got = summary.share_by_kind.at(kind);
    worst = std::max(worst, std::abs(got - want));
    shares += " " + std::string(to_string(kind)) + "=" + fmt(got, 4);
  }
  const json j = json::parse(summary_to_json(summary));
  std::vector<std::string> missing;
  for (const char* key : {"total_tweets", "date_range", "unique_users", "count_by_kind",
                          "share_by_kind", "unique_hashtags", "top_political_hashtags",
                          "political_keywords"}) {
    if (!j.contains(key) || j[key].is_null()) missing.push_back(key);
  }
  for (const char* kind : {"original", "retweet", "quote", "reply"}) {
    if (!j["count_by_kind"].contains(kind) || !j["share_by_kind"].contains(kind)) {
      missing.push_back(std::string("kind ") + kind);
    }
  }
  std::string missing_text;
  for (const auto& m : missing) missing_text += " " + m;
  return {summary.total_tweets == 50000 && worst <= 0.01 && missing.empty(),
          std::to_string(summary.total_tweets) + " tweets," + shares + " (max deviation " +
              fmt(worst, 4) + "); missing fields:" + (missing.empty() ? " none" : missing_text)};
}

// ---- detector closed loop ----------------------------------------------------------

PipelineConfig planted_config(std::uint64_t seed, const fs::path& out) {
  PipelineConfig cfg;
  cfg.seed = seed;
  cfg.output_dir = out.string();
  cfg.synth.campaigns = {HijackCampaign{}, ActivismCampaign{}, MegaphoneCampaign{}};
  return cfg;
}

struct DetectorTally {
  std::size_t findings = 0, true_findings = 0, planted = 0, recalled = 0;
  double precision() const {
    return findings ? static_cast<double>(true_findings) / static_cast<double>(findings) : 1.0;
  }
  double recall() const {
    return planted ? static_cast<double>(recalled) / static_cast<double>(planted) : 0.0;
  }
};

// Scores one finished run against its ground truth. Hijack and megaphone
// findings match on the planted subject. An activism finding names a
// retweet-network community; it is correct when at least half of its
// members are planted, and a planted cluster counts as found when correct
// findings cover at least half of it.
void score_run(const fs::path& out, std::map<std::string, DetectorTally>& tally) {
  const json truth = json::parse(oracle::slurp(out / "synth/truth.json"));
  const auto part = partition_from_csv(oracle::slurp(out / "communities/retweet.partition.csv"));
  std::map<std::uint32_t, std::vector<std::string>> members;
  for (std::size_t i = 0; i < part.nodes.size(); ++i) {
    members[part.assignment[i]].push_back(part.nodes[i]);
  }
  std::vector<json> findings;
  std::istringstream lines(oracle::slurp(out / "influence/findings.jsonl"));
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) findings.push_back(json::parse(line));
  }
  for (const auto& campaign : truth["campaigns"]) {
    const std::string kind = campaign["kind"];
    auto& t = tally[kind];
    ++t.planted;
    const auto subjects = campaign["subjects"].get<std::vector<std::string>>();
    const auto users = campaign["user_ids"].get<std::set<std::string>>();
    std::size_t covered = 0;
    bool found = false;
    for (const auto& f : findings) {
      if (f["kind"] != kind) continue;
      const std::string subject = f["subject"];
      if (kind == "embedded_activism") {
        const auto c = static_cast<std::uint32_t>(std::stoul(subject.substr(subject.find(':') + 1)));
        std::size_t planted = 0;
        for (const auto& m : members[c]) planted += users.contains(m) ? 1 : 0;
        if (2 * planted >= members[c].size()) covered += planted;
      } else if (std::find(subjects.begin(), subjects.end(), subject) != subjects.end()) {
        found = true;
      }
    }
    if (kind == "embedded_activism") found = 2 * covered >= users.size();
    if (found) ++t.recalled;
  }
  for (const auto& f : findings) {
    const std::string kind = f["kind"];
    auto& t = tally[kind];
    ++t.findings;
    const std::string subject = f["subject"];
    for (const auto& campaign : truth["campaigns"]) {
      if (campaign["kind"] != kind) continue;
      const auto users = campaign["user_ids"].get<std::set<std::string>>();
      const auto subjects = campaign["subjects"].get<std::vector<std::string>>();
      bool correct = false;
      if (kind == "embedded_activism") {
        const auto c = static_cast<std::uint32_t>(std::stoul(subject.substr(subject.find(':') + 1)));
        std::size_t planted = 0;
        for (const auto& m : members[c]) planted += users.contains(m) ? 1 : 0;
        correct = !members[c].empty() && 2 * planted >= members[c].size();
      } else {
        correct = std::find(subjects.begin(), subjects.end(), subject) != subjects.end();
      }
      if (correct) {
        ++t.true_findings;
        break;
      }
    }
  }
}

Outcome detector_closed_loop(const fs::path& work, std::size_t corpora) {
  std::map<std::string, DetectorTally> tally;
  double slowest = 0.0;
  std::string errors;
  for (std::uint64_t seed = 1; seed <= corpora; ++seed) {
    const fs::path out = work / ("loop-" + std::to_string(seed));
    fs::remove_all(out);
    const auto t0 = Clock::now();
    try {
      Pipeline(planted_config(seed, out)).run_all();
    } catch (const std::exception& e) {
      errors += " seed " + std::to_string(seed) + ": " + e.what();
      continue;
    }
    slowest = std::max(slowest, seconds_since(t0));
    score_run(out, tally);
    std::cerr << "  corpus " << seed << "/" << corpora << " done in " << fmt(seconds_since(t0), 1)
              << " s\n";
    if (seed > 1) fs::remove_all(out);  // the first run is reused for determinism
  }
  bool pass = errors.empty() && slowest < 300.0;
  std::string detail;
  for (const char* kind : {"hijack", "embedded_activism", "megaphone"}) {
    const auto& t = tally[kind];
    pass = pass && t.planted == corpora && t.recall() >= 0.9 && t.precision() >= 0.8;
    detail += std::string(kind) + " recall " + fmt(t.recall()) + " precision " +
              fmt(t.precision()) + " (" + std::to_string(t.true_findings) + "/" +
              std::to_string(t.findings) + "); ";
  }
  detail += std::to_string(corpora) + " corpora of 50000 tweets, slowest pipeline " +
            fmt(slowest, 1) + " s" + errors;
  return {pass, detail};
}

// ---- determinism ----------------------------------------------------------------------

Outcome determinism(const fs::path& work) {
  const fs::path a = work / "loop-1", b = work / "determinism-b";
  fs::remove_all(b);
  if (!fs::exists(a / "report.json")) {
    fs::remove_all(a);
    Pipeline(planted_config(1, a)).run_all();
  }
  Pipeline(planted_config(1, b)).run_all();
  // Output directories differ, so compare with the path stripped; it is not
  // part of any artifact.
  const auto ta = oracle::tree(a), tb = oracle::tree(b);
  std::size_t differing = 0;
  std::string first;
  for (const auto& [path, content] : ta) {
    auto it = tb.find(path);
    if (it == tb.end() || it->second != content) {
      if (first.empty()) first = " first: " + path;
      ++differing;
    }
  }
  const bool same_set = ta.size() == tb.size();
  fs::remove_all(b);
  return {differing == 0 && same_set && !ta.empty(),
          std::to_string(ta.size()) + " files compared, " + std::to_string(differing) +
              " differ" + (same_set ? "" : ", file sets differ") + first};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pitchside acceptance suite"};
  std::string work_dir = (fs::temp_directory_path() / "pitchside-acceptance").string();
  std::vector<std::string> only;
  std::size_t corpora = 20;
  app.add_option("--work-dir", work_dir, "Scratch directory for pipeline runs");
  app.add_option("--only", only, "Run only the named criteria");
  app.add_option("--corpora", corpora, "Corpora in the detector closed loop")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  const fs::path work(work_dir);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"projection_oracle_equivalence", projection_oracle},
      {"louvain_planted_recovery", louvain_recovery},
      {"centrality_exactness", centrality_exactness},
      {"extraction_correctness", extraction_correctness},
      {"summary_table_shape", table_shape},
      {"detector_closed_loop", [&] { return detector_closed_loop(work, corpora); }},
      {"determinism", [&] { return determinism(work); }},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(seconds_since(t0), 1)
              << " s): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
