#include "http_util.hpp"

#include <httplib.h>

#include "ats/error.hpp"

namespace ats::http {

Endpoint parse_base_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw Error(Errc::ConfigError, "base URL needs a scheme: " + std::string(url));
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw Error(Errc::ConfigError, "unsupported scheme in " + std::string(url));
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Endpoint ep;
  ep.origin = std::string(url.substr(0, path_start));
  if (ep.origin.size() <= host_start) throw Error(Errc::ConfigError, "base URL has no host: " + std::string(url));
  if (path_start != std::string_view::npos) {
    ep.path_prefix = std::string(url.substr(path_start));
    while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
  }
  return ep;
}

PostResult post_json(const Endpoint& endpoint, std::string_view path, const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  const std::string full_path = endpoint.path_prefix + std::string(path);

  PostResult result;
  auto res = client.Post(full_path, h, body, "application/json");
  if (!res) {
    result.error = httplib::to_string(res.error());
    return result;
  }
  result.ok = true;
  result.response.status = res->status;
  result.response.body = res->body;
  return result;
}

}  // namespace ats::http
