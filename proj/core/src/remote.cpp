#include "coldstart/remote.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "coldstart/error.hpp"
#include "coldstart/io.hpp"

namespace coldstart {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw InvalidArgument(fmt::format("endpoint url '{}' must start with http://", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  parsed.origin = url.substr(0, path_start);
  parsed.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (parsed.origin.size() <= scheme_end + 3) throw InvalidArgument(fmt::format("endpoint url '{}' has no host", url));
  return parsed;
}

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

void RemoteEmbeddingEndpoint::validate() const {
  parse_url(url);
  if (!(timeout_seconds > 0.0)) throw InvalidArgument("endpoint timeout must be positive");
  if (!(backoff_seconds >= 0.0)) throw InvalidArgument("endpoint backoff must be nonnegative");
  if (max_concurrency == 0) throw InvalidArgument("endpoint concurrency must be at least 1");
}

std::vector<double> parse_embedding_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("embedding response is not valid JSON: {}", e.what()));
  }
  if (!j.is_array() || j.empty()) throw ParseError("embedding response must be a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("embedding response contains a non-numeric element");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError("embedding response contains a non-finite value");
    out.push_back(x);
  }
  return out;
}

EmbeddingDataset fetch_embeddings(const RemoteEmbeddingEndpoint& endpoint,
                                  std::span<const std::filesystem::path> images, Provenance provenance,
                                  FetchStats* stats, const std::function<void(std::string_view)>& log) {
  endpoint.validate();
  const ParsedUrl url = parse_url(endpoint.url);

  std::vector<SampleId> ids;
  ids.reserve(images.size());
  for (const auto& path : images) ids.emplace_back(path.stem().string());

  std::mutex log_mutex;
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> retries{0};
  const auto note = [&](const std::string& message) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    log(message);
  };

  const auto timeout = std::chrono::duration<double>(endpoint.timeout_seconds);
  const auto fetch_one = [&](std::size_t i) {
    const std::string body = io::read_file(images[i]);
    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
      if (attempt > 0) {
        ++retries;
        note(fmt::format("retry {}/{} for {}: {}", attempt, endpoint.max_retries, images[i].string(), last_error));
        const double wait = endpoint.backoff_seconds * std::pow(2.0, static_cast<double>(attempt - 1));
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
      }
      ++requests;
      auto res = client.Post(url.path, body, endpoint.content_type);
      if (!res) {
        last_error = fmt::format("connection error: {}", httplib::to_string(res.error()));
        continue;
      }
      if (res->status == 200) return parse_embedding_response(res->body);
      last_error = fmt::format("HTTP {}", res->status);
      if (!transient(res->status)) break;
    }
    throw Error(fmt::format("fetching embedding for '{}' failed: {}", images[i].string(), last_error));
  };

  std::vector<std::vector<double>> vectors(images.size());
  for (std::size_t start = 0; start < images.size(); start += endpoint.max_concurrency) {
    const std::size_t end = std::min(images.size(), start + endpoint.max_concurrency);
    std::vector<std::future<std::vector<double>>> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, fetch_one, i));
    std::optional<std::string> failure;
    for (std::size_t i = start; i < end; ++i) {
      try {
        vectors[i] = batch[i - start].get();
      } catch (const std::exception& e) {
        if (!failure) failure = e.what();
      }
    }
    if (failure) throw Error(*failure);
  }

  if (stats) *stats = FetchStats{requests.load(), retries.load()};

  EmbeddingDataset ds;
  ds.provenance = provenance;
  ds.ids = std::move(ids);
  const std::size_t d = vectors.empty() ? 0 : vectors.front().size();
  std::vector<double> flat;
  flat.reserve(images.size() * d);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) {
      throw ParseError(fmt::format("inconsistent embedding dimensionality: '{}' returned {} values, expected {}",
                                   images[i].string(), vectors[i].size(), d));
    }
    flat.insert(flat.end(), vectors[i].begin(), vectors[i].end());
  }
  ds.vectors = Matrix(images.size(), d, std::move(flat));
  if (!images.empty()) require_valid(ds);
  return ds;
}

}  // namespace coldstart
