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

// File-in, file-out pipelines driven by a JSON option object. Every report
// has the shape
//   {"command": ..., "config": {resolved options}, "result": {...},
//    "warnings": [...], "meta": {"elapsed_seconds": ...}}
// and everything outside "meta" is a pure function of the inputs.

#ifndef SFNS_PIPELINES_H_
#define SFNS_PIPELINES_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "retrieval.h"

namespace sfns {

// Commands: tokenize.train, tokenize.apply, encoder.train, encoder.encode,
// index.build, index.search, index.stats, search, mine.pairs,
// mine.negatives, mine.split, eval.run, sim.replay, gen.synth.
nlohmann::json RunPipeline(std::string_view command, const nlohmann::json& options);

std::vector<std::string> PipelineCommands();

// JSONL {"id": ..., "text": ..., "payload": ...}; payload optional.
std::vector<TextDoc> LoadTextDocs(const std::string& path);

}  // namespace sfns

#endif  // SFNS_PIPELINES_H_
