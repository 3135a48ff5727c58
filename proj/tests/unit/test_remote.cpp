#include <doctest.h>

#include <atomic>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "coldstart/error.hpp"
#include "coldstart/io.hpp"
#include "coldstart/remote.hpp"
#include "temp_dir.hpp"

using namespace coldstart;

namespace {

// In-process embedding service on a free port.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/embed", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::vector<std::filesystem::path> write_images(const TempDir& dir, std::size_t n) {
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = dir / ("img" + std::to_string(i) + ".pgm");
    io::write_file(p, "P2\n1 1\n255\n" + std::to_string(i) + "\n");
    paths.push_back(p);
  }
  return paths;
}

}  // namespace

TEST_CASE("response parsing") {
  CHECK(parse_embedding_response("[1.0, 2.5]") == std::vector<double>{1.0, 2.5});
  CHECK_THROWS_AS(parse_embedding_response("[]"), ParseError);
  CHECK_THROWS_AS(parse_embedding_response("{\"a\": 1}"), ParseError);
  CHECK_THROWS_AS(parse_embedding_response("[1, \"x\"]"), ParseError);
  CHECK_THROWS_AS(parse_embedding_response("not json"), ParseError);
}

TEST_CASE("endpoint validation") {
  RemoteEmbeddingEndpoint e;
  e.url = "ftp://host/x";
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
  e.url = "http://host:1/x";
  CHECK_NOTHROW(e.validate());
  e.max_concurrency = 0;
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
}

TEST_CASE("fetch assembles one row per image in input order") {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    // echo the pixel value so row order is observable
    const auto img = io::parse_image(req.body);
    res.set_content(fmt::format("[1.0, {}]", img.values[0] * 255.0), "application/json");
  });
  TempDir dir;
  const auto paths = write_images(dir, 3);
  RemoteEmbeddingEndpoint e;
  e.url = server.url();
  FetchStats stats;
  const auto ds = fetch_embeddings(e, paths, Provenance::kTxrv, &stats);
  CHECK(ds.size() == 3);
  CHECK(ds.dim() == 2);
  CHECK(ds.provenance == Provenance::kTxrv);
  CHECK(ds.ids == make_ids({"img0", "img1", "img2"}));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ds.vectors(i, 0) == 1.0);
    CHECK(ds.vectors(i, 1) == doctest::Approx(static_cast<double>(i)));
  }
  CHECK(stats.requests == 3);
  CHECK(stats.retries == 0);
}

TEST_CASE("mismatched dimensions fail the whole fetch") {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto img = io::parse_image(req.body);
    res.set_content(img.values[0] > 0.0 ? "[1, 2, 3]" : "[1, 2]", "application/json");
  });
  TempDir dir;
  const auto paths = write_images(dir, 2);
  RemoteEmbeddingEndpoint e;
  e.url = server.url();
  CHECK_THROWS_WITH_AS(fetch_embeddings(e, paths), doctest::Contains("dimension"), Error);
}

TEST_CASE("transient failures are retried") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    if (calls.fetch_add(1) < 2) {
      res.status = 503;
      return;
    }
    res.set_content("[0.5]", "application/json");
  });
  TempDir dir;
  const auto paths = write_images(dir, 1);
  RemoteEmbeddingEndpoint e;
  e.url = server.url();
  e.max_retries = 3;
  e.backoff_seconds = 0.01;
  FetchStats stats;
  const auto ds = fetch_embeddings(e, paths, Provenance::kCustom, &stats);
  CHECK(ds.vectors(0, 0) == 0.5);
  CHECK(stats.retries == 2);
  CHECK(calls.load() == 3);
}

TEST_CASE("retries run out") {
  StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  TempDir dir;
  const auto paths = write_images(dir, 1);
  RemoteEmbeddingEndpoint e;
  e.url = server.url();
  e.max_retries = 1;
  e.backoff_seconds = 0.0;
  CHECK_THROWS_AS(fetch_embeddings(e, paths), Error);
}

TEST_CASE("client errors are not retried") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  TempDir dir;
  const auto paths = write_images(dir, 1);
  RemoteEmbeddingEndpoint e;
  e.url = server.url();
  e.backoff_seconds = 0.0;
  CHECK_THROWS_AS(fetch_embeddings(e, paths), Error);
  CHECK(calls.load() == 1);
}
