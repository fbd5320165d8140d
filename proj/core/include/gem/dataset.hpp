#pragma once

#include "gem/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gem {

struct DatasetBundle {
  std::string name;
  std::vector<Query> queries;
  AdDatabase addb;
  DatasetMode mode = DatasetMode::chatbot;
};

// Loads manifest.json + queries.jsonl + ads.jsonl from a dataset directory.
// Schema and invariant violations are collected with file and line numbers
// and thrown as one DataError after the first 10 offenses.
DatasetBundle load_dataset(const std::filesystem::path& dir);

}  // namespace gem
