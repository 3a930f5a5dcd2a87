#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ads/artifact.hpp"
#include "ads/recommend.hpp"
#include "json.hpp"

namespace ads {

struct HttpResponse {
  int status = 200;
  std::string body;
};

// Request handling without any transport; one immutable artifact shared
// by every request.
class Service {
 public:
  Service(std::optional<ModelArtifact> artifact, PackageCatalog catalog,
          std::optional<nlohmann::json> grid_report = std::nullopt);

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body = "") const;

  HttpResponse health() const;
  HttpResponse schema() const;
  HttpResponse packages() const;
  HttpResponse whatif(const std::string& body) const;
  HttpResponse grid() const;

 private:
  std::optional<ModelArtifact> artifact_;
  PackageCatalog catalog_;
  std::optional<nlohmann::json> grid_;
};

// The intake field list served by /schema: one entry per predictor.
nlohmann::json schema_fields(const CohortSchema& schema);

// HTTP transport over a Service.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port; returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ads
