#pragma once

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>

namespace actbench::net {

struct HttpResponse {
  int status = 0;
  std::string body;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// POST to a full URL ("https://host:port/path"). Throws TransportError when
// no HTTP response was received; non-2xx statuses are returned as-is.
HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                  const std::map<std::string, std::string>& headers = {},
                  std::chrono::seconds timeout = std::chrono::seconds(60));

}  // namespace actbench::net
