#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ats::http {

struct Endpoint {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // without trailing slash, may be empty
};

Endpoint parse_base_url(std::string_view url);

struct Response {
  int status = 0;
  std::string body;
};

struct PostResult {
  bool ok = false;  // false on connection/transport failure
  Response response;
  std::string error;
};

PostResult post_json(const Endpoint& endpoint, std::string_view path, const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     std::chrono::milliseconds timeout);

}  // namespace ats::http
