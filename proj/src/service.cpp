#include "ads/service.hpp"

#include "ads/error.hpp"
#include "httplib.h"

namespace ads {

using nlohmann::json;

namespace {

HttpResponse ok(const json& j) { return {200, j.dump()}; }
HttpResponse fail(int status, const std::string& message) { return {status, json{{"error", message}}.dump()}; }

}  // namespace

json schema_fields(const CohortSchema& schema) {
  json fields = json::array();
  for (std::size_t i : schema.predictor_indices()) {
    const FeatureSpec& f = schema.at(i);
    json e{{"name", f.name}, {"kind", to_string(f.kind)}, {"service_field", f.service_field}};
    if (!f.is_numeric()) e["categories"] = f.categories;
    fields.push_back(std::move(e));
  }
  return fields;
}

Service::Service(std::optional<ModelArtifact> artifact, PackageCatalog catalog, std::optional<json> grid_report)
    : artifact_(std::move(artifact)), catalog_(std::move(catalog)), grid_(std::move(grid_report)) {
  if (artifact_) validate_catalog(catalog_, artifact_->schema);
}

HttpResponse Service::health() const { return ok({{"status", "ok"}, {"artifact_loaded", artifact_.has_value()}}); }

HttpResponse Service::schema() const {
  if (!artifact_) return fail(503, "no model artifact loaded");
  return ok({{"fields", schema_fields(artifact_->schema)}});
}

HttpResponse Service::packages() const { return ok(catalog_to_json(catalog_)); }

HttpResponse Service::whatif(const std::string& body) const {
  if (!artifact_) return fail(503, "no model artifact loaded");
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    return fail(400, std::string("malformed JSON: ") + e.what());
  }
  try {
    const Record client = record_from_json(artifact_->schema, j);
    return ok(recommendations_to_json(what_if(*artifact_, client, catalog_)));
  } catch (const ValueError& e) {
    return fail(422, e.what());
  } catch (const SchemaError& e) {
    return fail(400, e.what());
  } catch (const std::exception& e) {
    return fail(500, e.what());
  }
}

HttpResponse Service::grid() const {
  if (!grid_) return fail(404, "no grid report loaded");
  return ok(*grid_);
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  if (method == "GET") {
    if (path == "/health") return health();
    if (path == "/schema") return schema();
    if (path == "/packages") return packages();
    if (path == "/grid") return grid();
  } else if (method == "POST" && path == "/whatif") {
    return whatif(body);
  }
  return fail(404, "no route for " + method + " " + path);
}

struct HttpServer::Impl {
  explicit Impl(const Service& s) : service(s) {}
  const Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = impl_->service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  for (const char* p : {"/health", "/schema", "/packages", "/grid"}) impl_->server.Get(p, route);
  impl_->server.Post("/whatif", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace ads
