#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "actbench/http.hpp"

namespace actbench::net {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("URL without scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                  const std::map<std::string, std::string>& headers, std::chrono::seconds timeout) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  if (!client.is_valid()) throw TransportError("unsupported URL: " + url);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, content_type);
  if (!res) throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace actbench::net
