// Copyright 2026 The sfns Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipelines.h"

#include <fstream>
#include <string>

#include "error.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace sfns {
namespace {

using ::sfns::testing::TempDir;
using json = nlohmann::json;

json Result(const std::string& command, const json& options) {
  return RunPipeline(command, options).at("result");
}

json WithoutMeta(json report) {
  report.erase("meta");
  return report;
}

size_t CountLines(const std::string& path) {
  std::ifstream in(path);
  size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

// Runs the whole chain on a small generated corpus and returns every report.
json RunChain(const TempDir& dir) {
  const std::string d = dir.File("synth");
  json all = json::array();
  auto run = [&](const std::string& cmd, const json& opt) {
    json r = RunPipeline(cmd, opt);
    all.push_back(WithoutMeta(r));
    return r.at("result");
  };
  run("gen.synth", {{"out_dir", d}, {"entities", 80}, {"queries_per_entity", 3}});
  run("tokenize.train", {{"input", d + "/corpus.txt"},
                         {"out", dir.File("tok.tsv")},
                         {"vocab_size", 300},
                         {"max_piece_len", 3}});
  run("mine.pairs", {{"log", d + "/log.jsonl"}, {"out", dir.File("pairs.jsonl")}});
  run("mine.negatives", {{"log", d + "/log.jsonl"},
                         {"pairs", dir.File("pairs.jsonl")},
                         {"tokenizer", dir.File("tok.tsv")},
                         {"out", dir.File("triples.jsonl")},
                         {"n", 2}});
  run("encoder.train", {{"tokenizer", dir.File("tok.tsv")},
                        {"pairs", dir.File("triples.jsonl")},
                        {"out", dir.File("enc.bin")},
                        {"steps", 20},
                        {"dim", 4}});
  run("index.build", {{"tokenizer", dir.File("tok.tsv")},
                      {"params", dir.File("enc.bin")},
                      {"docs", d + "/docs.jsonl"},
                      {"out", dir.File("index.bin")}});
  run("eval.run", {{"method", "sparse"},
                   {"tokenizer", dir.File("tok.tsv")},
                   {"index", dir.File("index.bin")},
                   {"queries", d + "/queries.jsonl"},
                   {"qrels", d + "/qrels.jsonl"},
                   {"threads", 2}});
  run("mine.split", {{"log", d + "/log.jsonl"}, {"seed", 3}});
  run("sim.replay", {{"log", d + "/log.jsonl"},
                     {"catalog", d + "/docs.jsonl"},
                     {"tokenizer", dir.File("tok.tsv")},
                     {"epochs", 4}});
  return all;
}

TEST(PipelineTest, EndToEndChain) {
  TempDir dir;
  const json reports = RunChain(dir);
  ASSERT_EQ(reports.size(), 9u);
  EXPECT_EQ(reports[0]["result"]["docs"], 80);
  EXPECT_LE(reports[1]["result"]["longest_piece"].get<int>(), 3);
  EXPECT_GT(CountLines(dir.File("pairs.jsonl")), 0u);
  EXPECT_EQ(CountLines(dir.File("triples.jsonl")),
            reports[3]["result"]["triples"].get<size_t>());
  EXPECT_EQ(reports[4]["result"]["telemetry"].size(), 20u);
  EXPECT_EQ(reports[5]["result"]["docs"], 80);
  const json& ev = reports[6]["result"];
  EXPECT_GT(ev["evaluated"].get<size_t>(), 0u);
  const double r10 = ev["overall"]["metrics"]["10"]["recall"];
  EXPECT_GE(r10, 0.0);
  EXPECT_LE(r10, 1.0);
  EXPECT_TRUE(ev["slices"].contains("short_word"));
  const json& sim = reports[8]["result"];
  EXPECT_EQ(sim["epochs"][0]["epoch"], 0);
  for (const json& r : reports) {
    EXPECT_TRUE(r.contains("config"));
    EXPECT_TRUE(r.contains("warnings"));
  }
}

TEST(PipelineTest, DeterministicApartFromMeta) {
  TempDir a;
  TempDir b;
  json ra = RunChain(a);
  json rb = RunChain(b);
  // Paths differ between the two runs; compare everything else.
  auto strip = [](json& reports, const TempDir& dir) {
    std::string text = reports.dump();
    const std::string root = dir.File("");
    for (size_t p; (p = text.find(root)) != std::string::npos;) {
      text.replace(p, root.size(), "<dir>/");
    }
    return text;
  };
  EXPECT_EQ(strip(ra, a), strip(rb, b));
}

TEST(PipelineTest, SearchAndStats) {
  TempDir dir;
  std::ofstream(dir.File("corpus.txt")) << "taylor swift\npink\ntaylor\nswift\n";
  std::ofstream(dir.File("docs.jsonl"))
      << "{\"id\":\"e1\",\"text\":\"Taylor Swift\"}\n{\"id\":\"e2\",\"text\":\"Pink\"}\n";
  Result("tokenize.train", {{"input", dir.File("corpus.txt")},
                            {"out", dir.File("tok.tsv")},
                            {"vocab_size", 40}});
  const json seg = Result("tokenize.apply",
                          {{"tokenizer", dir.File("tok.tsv")}, {"text", "Pink"}});
  EXPECT_FALSE(seg["pieces"].empty());
  Result("index.build", {{"tokenizer", dir.File("tok.tsv")},
                         {"docs", dir.File("docs.jsonl")},
                         {"out", dir.File("index.bin")}});
  const json stats = Result("index.stats", {{"index", dir.File("index.bin")}});
  EXPECT_EQ(stats["docs"], 2);
  for (const char* method : {"sparse", "trigram", "fuzzy"}) {
    const json hits = Result("search", {{"method", method},
                                        {"tokenizer", dir.File("tok.tsv")},
                                        {"docs", dir.File("docs.jsonl")},
                                        {"query", "tayler swift"},
                                        {"k", 10}})["hits"];
    ASSERT_FALSE(hits.empty()) << method;
    EXPECT_EQ(hits[0]["id"], "e1") << method;
    EXPECT_EQ(hits[0]["rank"], 1);
  }
}

TEST(PipelineTest, ErrorsCarryCodes) {
  TempDir dir;
  auto code = [](const std::string& cmd, const json& opt) {
    try {
      RunPipeline(cmd, opt);
    } catch (const Error& e) {
      return e.code();
    }
    return static_cast<ErrorCode>(0);
  };
  EXPECT_EQ(code("nope", {}), ErrorCode::kValidation);
  EXPECT_EQ(code("sim.replay", {{"catalog", "x"}}), ErrorCode::kValidation);
  EXPECT_EQ(code("index.stats", {{"index", dir.File("missing.bin")}}), ErrorCode::kIo);
  EXPECT_EQ(code("search", {{"method", "bm25"}, {"query", "x"}}),
            ErrorCode::kValidation);
  EXPECT_EQ(code("eval.run", {{"queries", 3}}), ErrorCode::kValidation);
  std::ofstream(dir.File("bad.bin")) << "SFNX0000000000000";
  EXPECT_EQ(code("index.stats", {{"index", dir.File("bad.bin")}}), ErrorCode::kFormat);
  EXPECT_SFNS_ERROR(RunPipeline("search", json::array()), kValidation);
  EXPECT_EQ(PipelineCommands().size(), 14u);
}

}  // namespace
}  // namespace sfns
