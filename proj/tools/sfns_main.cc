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

// Command-line front end. Flags are collected into a JSON option object and
// handed to sfns_run(); the JSON report goes to standard output.
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O or bad file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfns/sfns.h"

namespace {

using nlohmann::json;

enum class Kind { kString, kInt, kReal };

struct Flag {
  std::string key;
  Kind kind;
  std::string value;
  CLI::Option* option = nullptr;
};

// One subcommand: its CLI11 app plus the flags that feed the option object.
struct Command {
  std::string name;  // e.g. "index.build"
  CLI::App* app = nullptr;
  std::vector<std::unique_ptr<Flag>> flags;
  bool day_slices = false;
  std::string report_out;

  Command& Add(const std::string& flag, const std::string& key, Kind kind,
               const std::string& help, bool required = false) {
    flags.push_back(std::make_unique<Flag>(Flag{key, kind, "", nullptr}));
    Flag* f = flags.back().get();
    f->option = app->add_option(flag, f->value, help);
    if (kind == Kind::kInt) f->option->check(CLI::NonNegativeNumber);
    if (kind == Kind::kReal) f->option->check(CLI::Number);
    if (required) f->option->required();
    return *this;
  }

  json Options() const {
    json o = json::object();
    for (const auto& f : flags) {
      if (f->option->count() == 0) continue;
      switch (f->kind) {
        case Kind::kString:
          o[f->key] = f->value;
          break;
        case Kind::kInt:
          o[f->key] = std::stoull(f->value);
          break;
        case Kind::kReal:
          o[f->key] = std::stod(f->value);
          break;
      }
    }
    if (day_slices) o["replay_all_each_epoch"] = false;
    return o;
  }
};

Command& NewCommand(std::vector<std::unique_ptr<Command>>& all, CLI::App* parent,
                    const std::string& group, const std::string& sub,
                    const std::string& help) {
  all.push_back(std::make_unique<Command>());
  Command& c = *all.back();
  c.name = sub.empty() ? group : group + "." + sub;
  c.app = parent->add_subcommand(sub.empty() ? group : sub, help);
  return c;
}

void AddRetrieverFlags(Command& c) {
  c.Add("--method", "method", Kind::kString, "trigram, fuzzy or sparse (default)")
      .Add("--index", "index", Kind::kString, "sparse index file")
      .Add("--docs", "docs", Kind::kString, "documents JSONL (trigram, fuzzy, or sparse without --index)")
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model")
      .Add("--params", "params", Kind::kString, "encoder parameters for document expansion")
      .Add("--encoder", "query_weighting", Kind::kString, "query weighting: idf (default) or none")
      .Add("--max-edits", "max_edits", Kind::kInt, "fuzzy: 1 or 2")
      .Add("--prefix-lock", "prefix_lock", Kind::kInt, "fuzzy: exact leading characters");
}

int LogLevel() {
  const char* env = std::getenv("SFNS_LOG");
  const std::string level = env == nullptr ? "warn" : env;
  if (level == "error" || level == "quiet") return 0;
  if (level == "info") return 2;
  if (level == "debug") return 3;
  return 1;
}

int ExitCode(sfns_status status) {
  switch (status) {
    case SFNS_OK:
      return 0;
    case SFNS_ERR_IO:
    case SFNS_ERR_FORMAT:
    case SFNS_ERR_CHECKSUM:
    case SFNS_ERR_VERSION:
    case SFNS_ERR_TRUNCATED:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface-form robust sparse retrieval toolkit"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;

  auto* tokenize = app.add_subcommand("tokenize", "train or apply the subword tokenizer");
  tokenize->require_subcommand(1);
  NewCommand(commands, tokenize, "tokenize", "train", "train a unigram tokenizer")
      .Add("--input", "input", Kind::kString, "training text, one line per document", true)
      .Add("--vocab-size", "vocab_size", Kind::kInt, "target vocabulary size")
      .Add("--max-piece-len", "max_piece_len", Kind::kInt, "longest piece in characters")
      .Add("--shrink-factor", "shrink_factor", Kind::kReal, "pruning keep ratio per round")
      .Add("--em-iters", "em_iters", Kind::kInt, "EM iterations per round")
      .Add("--seed", "seed", Kind::kInt, "recorded only; training is deterministic")
      .Add("--out,--output", "out", Kind::kString, "model output path", true);
  NewCommand(commands, tokenize, "tokenize", "apply", "segment text")
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model", true)
      .Add("--text", "text", Kind::kString, "a single text to segment")
      .Add("--input", "input", Kind::kString, "text file, one line per item")
      .Add("--out", "out", Kind::kString, "JSONL output for --input");

  auto* encoder = app.add_subcommand("encoder", "train or apply the document encoder");
  encoder->require_subcommand(1);
  NewCommand(commands, encoder, "encoder", "train", "contrastive training with FLOPS regularization")
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model", true)
      .Add("--pairs", "pairs", Kind::kString, "JSONL {q, pos, negs}", true)
      .Add("--out", "out", Kind::kString, "parameter output path", true)
      .Add("--init", "init", Kind::kString, "initial parameters")
      .Add("--dim", "dim", Kind::kInt, "hidden size for random init")
      .Add("--steps", "steps", Kind::kInt, "optimizer steps")
      .Add("--batch-size", "batch_size", Kind::kInt, "items per batch")
      .Add("--lr", "lr", Kind::kReal, "learning rate")
      .Add("--momentum", "momentum", Kind::kReal, "SGD momentum")
      .Add("--lambda-reg,--lambda", "lambda_reg", Kind::kReal, "FLOPS regularization weight")
      .Add("--negatives", "negatives", Kind::kInt, "hard negatives per item")
      .Add("--seed", "seed", Kind::kInt, "random seed");
  NewCommand(commands, encoder, "encoder", "encode", "encode documents to sparse vectors")
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model", true)
      .Add("--params", "params", Kind::kString, "encoder parameters (indicator weights if absent)")
      .Add("--docs", "docs", Kind::kString, "documents JSONL {id, text}", true)
      .Add("--out", "out", Kind::kString, "vectors JSONL output", true);

  auto* index = app.add_subcommand("index", "build, search or inspect an index");
  index->require_subcommand(1);
  NewCommand(commands, index, "index", "build", "build an inverted index")
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model", true)
      .Add("--docs", "docs", Kind::kString, "documents JSONL {id, text, payload}")
      .Add("--vectors", "vectors", Kind::kString, "precomputed vectors JSONL {id, vec}")
      .Add("--params", "params", Kind::kString, "encoder parameters for --docs")
      .Add("--out", "out", Kind::kString, "index output path", true);
  NewCommand(commands, index, "index", "search", "top-k search")
      .Add("--index", "index", Kind::kString, "index file", true)
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model", true)
      .Add("--query", "query", Kind::kString, "query text", true)
      .Add("--k", "k", Kind::kInt, "number of hits")
      .Add("--encoder", "query_weighting", Kind::kString, "query weighting: idf or none");
  NewCommand(commands, index, "index", "stats", "index statistics")
      .Add("--index", "index", Kind::kString, "index file", true);

  Command& search = NewCommand(commands, &app, "search", "", "search with any retriever");
  AddRetrieverFlags(search);
  search.Add("--query", "query", Kind::kString, "query text", true)
      .Add("--k", "k", Kind::kInt, "number of hits");

  auto* mine = app.add_subcommand("mine", "weak supervision from behavior logs");
  mine->require_subcommand(1);
  NewCommand(commands, mine, "mine", "pairs", "positive pairs")
      .Add("--log", "log", Kind::kString, "behavior log JSONL", true)
      .Add("--out", "out", Kind::kString, "pairs JSONL output", true)
      .Add("--min-engagements", "min_engagements", Kind::kInt, "drop records below this count");
  NewCommand(commands, mine, "mine", "negatives", "hard negatives via retrieval")
      .Add("--pairs", "pairs", Kind::kString, "pairs JSONL", true)
      .Add("--log", "log", Kind::kString, "behavior log JSONL", true)
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model", true)
      .Add("--index", "index", Kind::kString, "index over candidate queries")
      .Add("--params", "params", Kind::kString, "encoder parameters")
      .Add("--n", "n", Kind::kInt, "negatives per pair")
      .Add("--depth", "depth", Kind::kInt, "retrieved candidates per pair")
      .Add("--min-engagements", "min_engagements", Kind::kInt, "drop records below this count")
      .Add("--out", "out", Kind::kString, "triples JSONL output", true);
  NewCommand(commands, mine, "mine", "split", "component-wise train/test split")
      .Add("--log", "log", Kind::kString, "behavior log JSONL", true)
      .Add("--test-frac", "test_frac", Kind::kReal, "share of queries in test")
      .Add("--seed", "seed", Kind::kInt, "random seed")
      .Add("--min-engagements", "min_engagements", Kind::kInt, "drop records below this count")
      .Add("--out", "out", Kind::kString, "split manifest output");

  auto* eval = app.add_subcommand("eval", "benchmarks");
  eval->require_subcommand(1);
  Command& eval_run = NewCommand(commands, eval, "eval", "run", "recall, precision and NDCG");
  AddRetrieverFlags(eval_run);
  eval_run.Add("--queries", "queries", Kind::kString, "queries JSONL {q, slice}", true)
      .Add("--qrels", "qrels", Kind::kString, "judgments JSONL {q, rel}", true)
      .Add("--k", "k", Kind::kString, "comma-separated cutoffs")
      .Add("--threads", "threads", Kind::kInt, "worker threads")
      .Add("--warmup", "warmup", Kind::kInt, "untimed warmup queries")
      .Add("--rel-key", "rel_key", Kind::kString, "match judgments on doc id or payload")
      .Add("--csv", "csv", Kind::kString, "also write metrics as CSV");
  eval_run.app->add_option("--out", eval_run.report_out, "write the report here too");

  auto* sim = app.add_subcommand("sim", "feedback-loop simulation");
  sim->require_subcommand(1);
  Command& replay = NewCommand(commands, sim, "sim", "replay", "replay the exploration loop");
  replay.Add("--log", "log", Kind::kString, "behavior log JSONL", true)
      .Add("--catalog", "catalog", Kind::kString, "catalog JSONL {id, text}", true)
      .Add("--channel", "channel", Kind::kString, "trigram, sparse, fuzzy or none")
      .Add("--tokenizer", "tokenizer", Kind::kString, "tokenizer model (sparse channel)")
      .Add("--params", "params", Kind::kString, "encoder parameters (sparse channel)")
      .Add("--fuzzy-top", "fuzzy_top", Kind::kInt, "fuzzy candidates per query")
      .Add("--k", "k", Kind::kInt, "recall cutoff")
      .Add("--epochs", "epochs", Kind::kInt, "epochs after cold start")
      .Add("--min-engagements", "min_engagements", Kind::kInt, "ground-truth engagement floor")
      .Add("--threads", "threads", Kind::kInt, "worker threads")
      .Add("--max-edits", "max_edits", Kind::kInt, "fuzzy channel: 1 or 2")
      .Add("--prefix-lock", "prefix_lock", Kind::kInt, "fuzzy channel prefix lock")
      .Add("--entries-out", "entries_out", Kind::kString, "final stored entries JSONL");
  replay.app->add_flag("--day-slices", replay.day_slices,
                       "epoch t replays only the days seen so far");
  replay.app->add_flag("--replay-all-each-epoch",
                       "replay every query each epoch (default)");
  replay.app->add_option("--out", replay.report_out, "write the report here too");

  auto* gen = app.add_subcommand("gen", "data generators");
  gen->require_subcommand(1);
  NewCommand(commands, gen, "gen", "synth", "synthetic typo corpus")
      .Add("--seed", "seed", Kind::kInt, "random seed")
      .Add("--entities", "entities", Kind::kInt, "number of entities")
      .Add("--queries-per-entity", "queries_per_entity", Kind::kInt, "typo'd queries per entity")
      .Add("--family-fraction", "family_fraction", Kind::kReal, "share of short-word family entities")
      .Add("--family-size", "family_size", Kind::kInt, "members per family")
      .Add("--days", "days", Kind::kInt, "log days")
      .Add("--out-dir", "out_dir", Kind::kString, "output directory", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    if (c->app->parsed()) chosen = c.get();
  }
  if (chosen == nullptr) {
    std::cerr << app.help();
    return 1;
  }

  json options;
  try {
    options = chosen->Options();
  } catch (const std::exception& e) {
    std::cerr << "error: bad numeric flag value\n";
    return 1;
  }

  char* raw = nullptr;
  const sfns_status status = sfns_run(chosen->name.c_str(), options.dump().c_str(), &raw);
  if (status != SFNS_OK) {
    std::cerr << "error (" << sfns_status_name(status) << "): " << sfns_last_error()
              << "\n";
    return ExitCode(status);
  }
  const json report = json::parse(raw);
  sfns_string_free(raw);

  const int level = LogLevel();
  if (level >= 1) {
    for (const auto& w : report["warnings"]) {
      std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
  }
  if (level >= 2) {
    std::cerr << "info: " << chosen->name << " finished in "
              << report["meta"]["elapsed_seconds"].get<double>() << " s\n";
  }
  const std::string text = report.dump(2) + "\n";
  if (!chosen->report_out.empty()) {
    std::ofstream out(chosen->report_out, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "error (io): cannot write '" << chosen->report_out << "'\n";
      return 2;
    }
  }
  std::cout << text;
  return 0;
}
