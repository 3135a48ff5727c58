#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldstart/dataset.hpp"

namespace coldstart {

struct RemoteEmbeddingEndpoint {
  std::string url;  // http://host[:port]/path
  double timeout_seconds = 30.0;
  std::size_t max_retries = 3;
  double backoff_seconds = 0.5;  // doubled after every failed attempt
  std::size_t max_concurrency = 4;
  std::string content_type = "application/octet-stream";

  void validate() const;
};

struct FetchStats {
  std::size_t requests = 0;
  std::size_t retries = 0;
};

// Body of a successful response: a JSON array of finite numbers.
std::vector<double> parse_embedding_response(std::string_view body);

// POSTs each image's bytes to the endpoint and assembles the returned vectors,
// in input order, into a dataset whose ids are the file stems. Transient
// failures (connection errors, 429, 5xx) are retried with exponential backoff.
// Either every image succeeds or nothing is returned.
EmbeddingDataset fetch_embeddings(const RemoteEmbeddingEndpoint& endpoint,
                                  std::span<const std::filesystem::path> images,
                                  Provenance provenance = Provenance::kCustom,
                                  FetchStats* stats = nullptr,
                                  const std::function<void(std::string_view)>& log = {});

}  // namespace coldstart
